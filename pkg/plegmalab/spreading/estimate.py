import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

from plegmalab.core.finset import Universe
from plegmalab.core.plegma import PlegmaTuple, enumerate_plegma, plegma_from_flat
from plegmalab.norms.sparse import SparseVec
from plegmalab.sequences.kseq import KSeqGen, shifted_seq
from plegmalab.util.errors import InvalidInput
from plegmalab.util.parallel import parallel_map
from plegmalab.util.system import timethis
from plegmalab.util.types import Number, to_fraction

Coeffs = Tuple[Fraction, ...]
MODES = ("exhaustive", "sampled")


def coefficient_grid(
    l: int, q: int = 4, sphere: bool = False  # noqa: E741
) -> List[Coeffs]:
    """coefficient_grid Nonzero coefficient tuples with entries in (1/q)Z

    Without sphere, the grid on the unit ball of l^infinity_l, i.e. entries in [-1, 1].
    With sphere, the tuples with sum |a_i| = 1.

    Examples:
        >>> len(coefficient_grid(1, q=2))
        4
        >>> len(coefficient_grid(2, q=1, sphere=True))
        4
    """
    if l < 1 or q < 1:
        raise InvalidInput("Grids need l >= 1 and q >= 1")

    steps = [Fraction(i, q) for i in range(-q, q + 1)]

    if not sphere:
        return [a for a in itertools.product(steps, repeat=l) if any(a)]

    return sorted(
        a for a in itertools.product(steps, repeat=l) if sum(abs(v) for v in a) == 1
    )


def admissible_universe(
    universe: Universe, l: int, horizon: int  # noqa: E741
) -> Universe:
    """Elements of M between M(l) and the horizon. Plegma tuples of it are exactly the ones with s_1(1) >= M(l)."""
    start = universe.at(l)

    return Universe.explicit(e for e in universe.truncate(horizon) if e >= start)


def admissible_tuples(
    gen: KSeqGen,
    universe: Universe,
    l: int,  # noqa: E741
    m: int,
    horizon: int,
    mode: str = "exhaustive",
    samples: int = 200,
    seed: int = 0,
) -> List[PlegmaTuple]:
    """admissible_tuples Plegma m-tuples of [M]^k with s_1(1) >= M(l) and entries <= horizon

    The sampled mode draws flats uniformly (without repetition of a draw) with a seeded
    generator and maps them through the flat bijection.
    """
    if mode not in MODES:
        raise InvalidInput(f"Unknown estimation mode {mode}. Use one of {MODES}")

    pool = admissible_universe(universe, l, horizon).elements()
    size = gen.k * m

    if len(pool) < size:
        return []

    if mode == "exhaustive":
        return list(enumerate_plegma(Universe.explicit(pool), gen.k, m))

    rng = np.random.default_rng(seed)
    flats: Set[Tuple[int, ...]] = set()

    for _ in range(samples):
        picked = rng.choice(pool, size=size, replace=False).tolist()
        flats.add(tuple(sorted(picked)))

    return [plegma_from_flat(f, gen.k, m) for f in sorted(flats)]


@dataclass
class CoeffStats:
    min: float
    max: float
    mean: float
    count: int

    @property
    def width(self) -> float:
        return self.max - self.min

    @property
    def midpoint(self) -> float:
        return (self.min + self.max) / 2

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "CoeffStats":
        arr = np.asarray(values, dtype=float)
        lo, hi = float(arr.min()), float(arr.max())

        return cls(lo, hi, float(np.clip(arr.mean(), lo, hi)), int(arr.size))


@dataclass
class SMEstimate:
    """SMEstimate Empirical values of ||sum a_j x_{s_j}|| for admissible plegma tuples

    stats is empty when no admissible tuple exists below the horizon.
    """

    l: int  # noqa: E741
    m: int
    horizon: int
    mode: str
    grid: str
    stats: Dict[Coeffs, CoeffStats] = field(default_factory=dict)
    tuples: int = 0

    @property
    def empty(self) -> bool:
        return self.tuples == 0

    @property
    def width(self) -> float:
        return max((s.width for s in self.stats.values()), default=0.0)

    def value(self, coeffs: Sequence[Number]) -> float:
        """The reported value: the midpoint of the observed interval"""
        return self.stats[tuple(to_fraction(a) for a in coeffs)].midpoint

    def rows(self) -> List[List[Any]]:
        return [
            [
                self.l,
                self.m,
                " ".join(str(a) for a in coeffs),
                s.min,
                s.max,
                s.mean,
                s.count,
            ]
            for coeffs, s in self.stats.items()
        ]

    def to_json(self) -> Dict[str, Any]:
        return {
            "l": self.l,
            "m": self.m,
            "horizon": self.horizon,
            "mode": self.mode,
            "grid": self.grid,
            "tuples": self.tuples,
            "stats": [
                {
                    "coeffs": [str(a) for a in c],
                    "min": s.min,
                    "max": s.max,
                    "mean": s.mean,
                    "count": s.count,
                }
                for c, s in self.stats.items()
            ],
        }


ESTIMATE_HEADER = ["l", "m", "coeffs", "min", "max", "mean", "count"]


def _normalize_coeffs(coeffs: Sequence[Sequence[Number]], m: int) -> List[Coeffs]:
    out = []

    for a in coeffs:
        a = tuple(to_fraction(v) for v in a)

        if len(a) != m:
            raise InvalidInput(f"Coefficient tuple {a} does not have m={m} entries")

        if any(abs(v) > 1 for v in a):
            raise InvalidInput(f"Coefficients must lie in [-1, 1], got {a}")

        out.append(a)

    return out


def tuple_values(gen: KSeqGen, tuples: Sequence[PlegmaTuple], a: Coeffs) -> List[float]:
    return parallel_map(lambda t: gen.norm(gen.combination(a, t)), tuples)


def empirical_sm(
    gen: KSeqGen,
    universe: Universe,
    l: int,  # noqa: E741
    m: int,
    coeffs: Sequence[Sequence[Number]],
    horizon: int,
    mode: str = "exhaustive",
    samples: int = 200,
    seed: int = 0,
    grid: str = "custom",
) -> SMEstimate:
    """empirical_sm Estimate ||sum_{j=1}^m a_j e_j|| of a k-spreading model at level l

    Every admissible plegma m-tuple (s_1(1) >= M(l), entries <= horizon) is evaluated with
    the ambient engine of gen.

    Args:
        gen (KSeqGen): The k-sequence
        universe (Universe): M
        l (int): Level, fixes the starting point M(l)
        m (int): Tuple length, m <= l
        coeffs (Sequence[Sequence[Number]]): Coefficient tuples of length m, entries in [-1, 1]
        horizon (int): Largest index allowed in the tuples
        mode (str): "exhaustive" or "sampled"
        samples (int): Number of draws in sampled mode
        seed (int): Seed of the sampled mode
        grid (str): Description of the coefficient set, echoed in the result

    Raises:
        InvalidInput: m > l, or malformed coefficients

    Returns:
        SMEstimate: Per coefficient min, max, mean and count. Empty if nothing is admissible
    """
    if not 1 <= m <= l:
        raise InvalidInput(f"Need 1 <= m <= l, got m={m}, l={l}")

    coeffs = _normalize_coeffs(coeffs, m)
    tuples = admissible_tuples(
        gen, universe, l, m, horizon, mode=mode, samples=samples, seed=seed
    )
    est = SMEstimate(
        l=l, m=m, horizon=horizon, mode=mode, grid=grid, tuples=len(tuples)
    )

    if not tuples:
        logger.warning(
            f"No admissible plegma {m}-tuple below horizon {horizon} at level {l}"
        )

        return est

    for a in coeffs:
        est.stats[a] = CoeffStats.from_values(tuple_values(gen, tuples, a))

    logger.debug(f"Estimated l={l}, m={m} on {len(tuples)} tuples, width {est.width}")

    return est


def _signed(a: Coeffs) -> Iterator[Coeffs]:
    for signs in itertools.product((1, -1), repeat=len(a)):
        yield tuple(s * v for s, v in zip(signs, a))


def sign_flip_invariance(
    gen: KSeqGen,
    universe: Universe,
    l: int,  # noqa: E741
    coeffs: Sequence[Sequence[Number]],
    horizon: int,
) -> Optional[Dict[str, Any]]:
    """sign_flip_invariance First (tuple, a, flipped a) whose values differ, None if all agree

    Values are compared exactly tuple by tuple, for every sign pattern.
    """
    coeffs = _normalize_coeffs(coeffs, len(coeffs[0]) if coeffs else 0)

    for a in coeffs:
        tuples = admissible_tuples(gen, universe, l, len(a), horizon)

        for t in tuples:
            base = gen.norm(gen.combination(a, t))

            for b in _signed(a):
                flipped = gen.norm(gen.combination(b, t))

                if flipped != base:
                    return {
                        "tuple": t.to_json(),
                        "coeffs": [str(v) for v in a],
                        "flipped": [str(v) for v in b],
                        "values": [base, flipped],
                    }

    return None


def zero_sum_equality(
    gen: KSeqGen,
    v: SparseVec,
    universe: Universe,
    l: int,  # noqa: E741
    coeffs: Sequence[Sequence[Number]],
    horizon: int,
) -> Optional[Dict[str, Any]]:
    """zero_sum_equality Compare x and x - v on coefficient tuples with sum a_i = 0

    Tuples with a nonzero sum are skipped.

    Returns:
        Optional[Dict[str, Any]]: The first disagreement, None if all values are equal
    """
    shifted = shifted_seq(gen, v)

    for a in _normalize_coeffs(coeffs, len(coeffs[0]) if coeffs else 0):
        if sum(a) != 0:
            continue

        for t in admissible_tuples(gen, universe, l, len(a), horizon):
            lhs = gen.norm(gen.combination(a, t))
            rhs = shifted.norm(shifted.combination(a, t))

            if lhs != rhs:
                return {
                    "tuple": t.to_json(),
                    "coeffs": [str(c) for c in a],
                    "values": [lhs, rhs],
                }

    return None


def sparsify(universe: Universe, target_l: int) -> Universe:
    """sparsify Sub-universe with at least l - 1 elements of M between its l-th and (l+1)-th

    M'(1) = M(1) and M'(l+1) = M(index(M'(l)) + l). A finite M may run out, in which case the
    shorter universe is returned.

    Examples:
        >>> sparsify(Universe.naturals(), 4).elements()
        [1, 2, 4, 7]
    """
    picks: List[int] = []
    pos = 1

    for l in range(1, target_l + 1):  # noqa: E741
        if universe.is_finite and pos > len(universe):
            logger.warning(f"Universe exhausted after {len(picks)} sparsified elements")
            break

        picks.append(universe.at(pos))
        pos += l

    return Universe.explicit(picks)


@dataclass
class StabilizedRow:
    l: int  # noqa: E741
    m: int
    coeffs: Coeffs
    value: float
    width: float
    delta: float
    count: int

    @property
    def stable(self) -> bool:
        return self.count > 0 and self.width <= self.delta


@dataclass
class StabilizedTable:
    """StabilizedTable Norm table of the stabilized spreading model

    universe is the thinned M, sparsified the diagnostic sub-universe with l - 1 elements of
    M skipped between consecutive picks. partial lists the levels whose widths could not be
    pushed below delta_l before the horizon ran out.
    """

    universe: Universe
    sparsified: Universe
    rows: List[StabilizedRow]
    partial: List[int]
    removed: List[int]

    @property
    def complete(self) -> bool:
        return not self.partial

    def value(self, coeffs: Sequence[Number]) -> float:
        key = tuple(to_fraction(a) for a in coeffs)

        for row in reversed(self.rows):
            if row.coeffs == key:
                return row.value

        raise KeyError(key)

    def table(self) -> List[List[Any]]:
        return [
            [
                r.l,
                r.m,
                " ".join(str(a) for a in r.coeffs),
                r.value,
                r.width,
                r.delta,
                r.count,
                r.stable,
            ]
            for r in self.rows
        ]


STABILIZE_HEADER = ["l", "m", "coeffs", "value", "width", "delta", "count", "stable"]


def _level_estimates(
    gen: KSeqGen, universe: Universe, l: int, horizon: int, q: int  # noqa: E741
) -> List[SMEstimate]:
    return [
        empirical_sm(
            gen, universe, l, m, coefficient_grid(m, q), horizon, grid=f"linf q={q}"
        )
        for m in range(1, l + 1)
    ]


def _max_width(estimates: Sequence[SMEstimate]) -> float:
    return max((e.width for e in estimates), default=0.0)


def _level_filled(
    gen: KSeqGen, universe: Universe, l: int, horizon: int  # noqa: E741
) -> bool:
    """Level l still has admissible plegma l-tuples"""
    return len(admissible_universe(universe, l, horizon)) >= gen.k * l


@timethis()
def sm_stabilize(
    gen: KSeqGen,
    deltas: Sequence[Number],
    target_l: int,
    horizon: int,
    universe: Optional[Universe] = None,
    q: int = 4,
) -> StabilizedTable:
    """sm_stabilize Thin M until the empirical spreading model values settle

    For l = 1, ..., target_l and every m <= l and a on the l^infinity grid of resolution 1/q,
    the widths of the empirical intervals are pushed below delta_l by greedily removing the
    element of M (beyond M(l)) whose removal shrinks the largest width the most. A removal
    is only taken if every level stabilized so far keeps admissible tuples. Rows of levels
    finished before later removals are recomputed on the final M.

    Args:
        gen (KSeqGen): The k-sequence
        deltas (Sequence[Number]): delta_1 >= delta_2 >= ... > 0, at least target_l of them
        target_l (int): Last level
        horizon (int): Largest index considered
        universe (Optional[Universe]): Starting M, defaults to N
        q (int): Grid resolution

    Raises:
        InvalidInput: Schedule too short, not positive or not decreasing

    Returns:
        StabilizedTable: Midpoint values with their widths, partial levels flagged
    """
    deltas = [float(to_fraction(d)) for d in deltas]

    if len(deltas) < target_l:
        raise InvalidInput(f"Need {target_l} deltas, got {len(deltas)}")

    if any(d <= 0 for d in deltas) or any(a < b for a, b in zip(deltas, deltas[1:])):
        raise InvalidInput("deltas must be positive and decreasing")

    current = (universe or Universe.naturals()).truncate(horizon)
    rows: List[StabilizedRow] = []
    partial: List[int] = []
    removed: List[int] = []
    filled: List[int] = []
    finished: Dict[int, Tuple[int, List[SMEstimate]]] = {}

    for l in tqdm(range(1, target_l + 1), desc="stabilize", leave=False):  # noqa: E741
        delta = deltas[l - 1]
        estimates = _level_estimates(gen, current, l, horizon, q)

        while _max_width(estimates) > delta:
            candidates = current.elements()[l:]
            best: Optional[Tuple[float, int, List[SMEstimate]]] = None

            for c in candidates:
                trial = current.subset(e for e in current.elements() if e != c)

                if not all(_level_filled(gen, trial, j, horizon) for j in filled):
                    continue

                trial_est = _level_estimates(gen, trial, l, horizon, q)

                if any(e.empty for e in trial_est):
                    continue

                width = _max_width(trial_est)

                if best is None or width < best[0]:
                    best = (width, c, trial_est)

            if best is None:
                logger.warning(
                    f"Horizon {horizon} exhausted before level {l} stabilized"
                )
                partial.append(l)
                break

            _, c, estimates = best
            current = current.subset(e for e in current.elements() if e != c)
            removed.append(c)
            logger.debug(f"Removed {c} at level {l}, width now {best[0]}")

        if any(e.empty for e in estimates):
            if l not in partial:
                logger.warning(
                    f"No admissible tuples at level {l} below horizon {horizon}"
                )
                partial.append(l)
        else:
            filled.append(l)

        finished[l] = (len(removed), estimates)

    # later removals thin the tuples of earlier levels, so their rows are read off the final M
    for l in range(1, target_l + 1):  # noqa: E741
        removals, estimates = finished[l]

        if removals < len(removed):
            estimates = _level_estimates(gen, current, l, horizon, q)

            if any(e.empty for e in estimates) and l not in partial:
                logger.warning(
                    f"Level {l} lost its admissible tuples to later removals"
                )
                partial.append(l)

        for est in estimates:
            for coeffs, stats in est.stats.items():
                row = StabilizedRow(
                    l,
                    est.m,
                    coeffs,
                    stats.midpoint,
                    stats.width,
                    deltas[l - 1],
                    stats.count,
                )
                rows.append(row)

    partial.sort()
    table = StabilizedTable(
        current, sparsify(current, target_l), rows, partial, removed
    )
    logger.info(
        f"Stabilized {target_l} levels on {len(current)} elements, "
        f"removed {len(removed)}, partial levels {partial}"
    )

    return table
