from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, blocks_ordered, k_subsets
from plegmalab.core.plegma import enumerate_plegma
from plegmalab.core.search import flats_ending_at, grow_subuniverse
from plegmalab.norms.base import NormEngine
from plegmalab.norms.classical import C0Norm
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidInput
from plegmalab.util.system import timethis
from plegmalab.util.types import GenericDict


def _nodes(universe: Universe, k: int) -> Iterator[FinSubset]:
    """All t in [M]^{<=k}, shortest first"""
    for j in range(k + 1):
        yield from k_subsets(universe, j)


def default_eps(n: int) -> Fraction:
    return Fraction(1, 2 ** n)


@dataclass
class TreeMap:
    """TreeMap A map t -> phi(t) on [M]^{<=k} for a finite M, vectors in c00(N)

    Args:
        universe (Universe): Finite M
        k (int): Height of the tree
        nodes (Dict[FinSubset, SparseVec]): phi, defined on every t in [M]^{<=k}
        ambient (NormEngine): Norm used for the approximation errors
    """

    universe: Universe
    k: int
    nodes: Dict[FinSubset, SparseVec]
    ambient: NormEngine = field(default_factory=C0Norm)

    def __post_init__(self):
        if not self.universe.is_finite:
            raise InvalidInput("Tree maps live on a finite universe")

        self.nodes = {FinSubset(t): v for t, v in self.nodes.items()}

        for t in _nodes(self.universe, self.k):
            if t not in self.nodes:
                raise InvalidInput(f"Tree map is undefined at {tuple(t)}")

        for v in self.nodes.values():
            if v.arity is not None:
                raise InvalidInput("Tree map vectors must be indexed by N")

    def __call__(self, t: Sequence[int]) -> SparseVec:
        return self.nodes[FinSubset(t)]

    @classmethod
    def from_function(
        cls, fn: Callable[[FinSubset], SparseVec], universe: Universe, k: int, **kwargs
    ) -> "TreeMap":
        return cls(universe, k, {t: fn(t) for t in _nodes(universe, k)}, **kwargs)

    def to_json(self) -> GenericDict:
        ordered = sorted(self.nodes.items(), key=lambda kv: (len(kv[0]), kv[0]))

        return {
            "universe": self.universe.elements(),
            "k": self.k,
            "nodes": [{"node": list(t), "vector": v.to_json()} for t, v in ordered],
        }

    @classmethod
    def from_json(
        cls, data: GenericDict, ambient: Optional[NormEngine] = None
    ) -> "TreeMap":
        try:
            nodes = {
                FinSubset(e["node"]): SparseVec.from_json(e["vector"])
                for e in data["nodes"]
            }

            return cls(
                Universe.explicit(data["universe"]),
                int(data["k"]),
                nodes,
                ambient=ambient or C0Norm(),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"Malformed tree map: {exc}")


def tree_differences(phi: TreeMap) -> Dict[FinSubset, SparseVec]:
    """w_empty = phi(empty), w_t = phi(t) - phi(t minus its maximum)"""
    return {
        t: phi(t) if len(t) == 0 else phi(t) - phi(t.initial(len(t) - 1))
        for t in phi.nodes
    }


def random_tree_map(
    universe: Universe,
    k: int = 2,
    seed: int = 0,
    block_len: int = 3,
    tail_len: int = 3,
) -> TreeMap:
    """random_tree_map Random tree map whose differences are blocks plus small tails

    Node t of length j gets a block of block_len entries in [1/2, 1] placed near
    sum_i t(i) 10^{2i-1}, followed by tail_len entries 2^{-(n+2+r)}, n the position of max t.
    Supports of different nodes never meet as long as M is inside {1, ..., 99}.
    """
    elems = universe.elements()

    if elems and elems[-1] > 99:
        raise InvalidInput("random_tree_map needs a universe inside {1, ..., 99}")

    if block_len + tail_len > 10:
        raise InvalidInput("Block and tail must fit in a window of 10 coordinates")

    rng = np.random.default_rng(seed)
    w: Dict[FinSubset, SparseVec] = {}

    def block(base: int) -> List[Tuple[int, Fraction]]:
        entries = []

        for i in range(block_len):
            size = Fraction(int(rng.integers(8, 17)), 16)
            entries.append((base + i, size * int(rng.choice([-1, 1]))))

        return entries

    for t in _nodes(universe, k):
        if len(t) == 0:
            w[t] = SparseVec(block(1))
            continue

        base = sum(e * 10 ** (2 * i + 1) for i, e in enumerate(t))
        n = universe.index(t[-1])
        tail = [
            (base + block_len + r, Fraction(1, 2 ** (n + 2 + r)))
            for r in range(tail_len)
        ]
        w[t] = SparseVec(block(base) + tail)

    def phi(t: FinSubset) -> SparseVec:
        total = SparseVec()

        for j in range(len(t) + 1):
            total += w[t.initial(j)]

        return total

    return TreeMap.from_function(phi, universe, k)


@dataclass
class CanonicalTreeDecomposition:
    """CanonicalTreeDecomposition Vectors y_t on [L]^{<=k} so that x_s = sum_{j=0}^k y_{s|j}

    The ordering conditions checked by verify_ctd are

        * branch: supp y_{s|j1} < supp y_{s|j2} for 1 <= j1 < j2 <= k
        * plegma: supp y_{s1|j1} < supp y_{s2|j2} for plegma pairs (s1, s2) and j1 <= j2
        * cross: supp y_{s2|j1} < supp y_{s1|j2} for plegma pairs (s1, s2) and j1 < j2
    """

    universe: Universe
    k: int
    y: Dict[FinSubset, SparseVec]

    def node(self, t: Sequence[int]) -> SparseVec:
        return self.y.get(FinSubset(t), SparseVec())

    def x(self, s: Sequence[int]) -> SparseVec:
        s = FinSubset(s)
        total = SparseVec()

        for j in range(len(s) + 1):
            total += self.node(s.initial(j))

        return total

    def root(self) -> SparseVec:
        return self.node(())

    def to_json(self) -> GenericDict:
        return {
            "universe": self.universe.elements(),
            "k": self.k,
            "y": [
                {"node": list(t), "vector": v.to_json()}
                for t, v in sorted(self.y.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: GenericDict) -> "CanonicalTreeDecomposition":
        try:
            y = {
                FinSubset(e["node"]): SparseVec.from_json(e["vector"])
                for e in data["y"]
            }

            return cls(Universe.explicit(data["universe"]), int(data["k"]), y)
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"Malformed decomposition: {exc}")


def _supp(v: SparseVec) -> List[Any]:
    return list(v.keys())


def choose_interval(
    w: SparseVec, ambient: NormEngine, tol: Fraction
) -> Tuple[Optional[Tuple[int, int]], float]:
    """choose_interval Smallest window [a, b] with endpoints in supp w and ||w - I(w)|| < tol

    Ties go to the larger left endpoint. An empty support gives (None, 0.0).

    Returns:
        Tuple[Optional[Tuple[int, int]], float]: The window and the achieved error
    """
    supp = sorted(w.keys())

    if not supp:
        return None, 0.0

    for width in range(len(supp)):
        for a in reversed(range(len(supp) - width)):
            lo, hi = supp[a], supp[a + width]
            err = ambient(w.restrict(lambda i: not lo <= i <= hi))

            if err < float(tol):
                return (lo, hi), err

    # the full window has error 0
    return (supp[0], supp[-1]), 0.0


def _ordering_ok(
    y: Dict[FinSubset, SparseVec], k: int, chosen: List[int], m: int
) -> bool:
    for flat in flats_ending_at(chosen, m, k):
        s = FinSubset(flat)

        for j1 in range(1, k):
            for j2 in range(j1 + 1, k + 1):
                if not blocks_ordered(_supp(y[s.initial(j1)]), _supp(y[s.initial(j2)])):
                    return False

    for flat in flats_ending_at(chosen, m, 2 * k):
        s1, s2 = FinSubset(flat[0::2]), FinSubset(flat[1::2])

        for j1 in range(1, k + 1):
            for j2 in range(j1, k + 1):
                if not blocks_ordered(
                    _supp(y[s1.initial(j1)]), _supp(y[s2.initial(j2)])
                ):
                    return False

                if j1 < j2 and not blocks_ordered(
                    _supp(y[s2.initial(j1)]), _supp(y[s1.initial(j2)])
                ):
                    return False

    return True


@dataclass
class CTDExtraction:
    """Result of canonical_tree_extract

    errors maps each s in [L]^k to (||phi(s) - x_s||, eps_{L^{-1}(min s)}).
    """

    decomposition: CanonicalTreeDecomposition
    requested: Optional[int]
    complete: bool
    intervals: Dict[FinSubset, Optional[Tuple[int, int]]]
    errors: Dict[FinSubset, Tuple[float, float]]

    @property
    def universe(self) -> Universe:
        return self.decomposition.universe

    @property
    def within_tolerance(self) -> bool:
        return all(err < bound for err, bound in self.errors.values())

    def to_json(self) -> GenericDict:
        return {
            "complete": self.complete,
            "requested": self.requested,
            "size": len(self.universe),
            "within_tolerance": self.within_tolerance,
            "decomposition": self.decomposition.to_json(),
            "errors": [
                {"s": list(s), "error": err, "bound": bound}
                for s, (err, bound) in sorted(self.errors.items())
            ],
        }


@timethis()
def canonical_tree_extract(
    phi: TreeMap,
    target_size: Optional[int] = None,
    eps: Callable[[int], Fraction] = default_eps,
    node_limit: Optional[int] = None,
) -> CTDExtraction:
    """canonical_tree_extract Pass to a sub-universe L on which phi is close to a canonical tree

    Each difference w_t is cut to the smallest interval I_t with ||w_t - I_t(w_t)|| < eps_n / k,
    n the position of max t in M, and y_t = I_t(w_t) (the root keeps y_empty = phi(empty)).
    L is then chosen so that the y_t satisfy the ordering conditions of a canonical tree
    decomposition on [L]^{<=k}.

    When target_size cannot be reached, the largest L found is returned with complete=False.

    Args:
        phi (TreeMap): The tree map
        target_size (Optional[int]): Requested |L|, None for the largest L
        eps (Callable[[int], Fraction]): n -> eps_n, decreasing. Defaults to 2^{-n}
        node_limit (Optional[int]): Search budget for the sub-universe

    Returns:
        CTDExtraction: L, the decomposition and the approximation errors
    """
    k, universe = phi.k, phi.universe
    w = tree_differences(phi)
    y: Dict[FinSubset, SparseVec] = {FinSubset(): phi(())}
    intervals: Dict[FinSubset, Optional[Tuple[int, int]]] = {}

    for t, wt in w.items():
        if len(t) == 0:
            continue

        tol = eps(universe.index(t[-1])) / k
        window, _ = choose_interval(wt, phi.ambient, tol)
        intervals[t] = window

        if window is None:
            y[t] = SparseVec()
        else:
            lo, hi = window
            y[t] = wt.restrict(lambda i: lo <= i <= hi)

    def accept(chosen: List[int], m: int) -> bool:
        return _ordering_ok(y, k, chosen, m)

    elems = universe.elements()
    found = grow_subuniverse(
        elems, accept, target_size=target_size, node_limit=node_limit
    )
    complete = True

    if found is None:
        found = grow_subuniverse(elems, accept, node_limit=node_limit) or []
        complete = False
        logger.warning(
            f"No sub-universe of size {target_size} carries a canonical tree. Largest found: {len(found)}"
        )

    sub = Universe.explicit(found)
    kept = {t: v for t, v in y.items() if all(e in sub for e in t)}
    decomposition = CanonicalTreeDecomposition(sub, k, kept)
    errors = {}

    for s in k_subsets(sub, k):
        err = phi.ambient(phi(s) - decomposition.x(s))
        errors[s] = (err, float(eps(sub.index(s[0]))))

    logger.info(f"Canonical tree on |L|={len(found)} (requested {target_size})")

    return CTDExtraction(decomposition, target_size, complete, intervals, errors)


@dataclass
class CTDVerification:
    """Result of verify_ctd. violation names the first failed condition and where it failed."""

    ok: bool
    violation: Optional[GenericDict] = None
    checked: Dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _fail(condition: str, **where) -> CTDVerification:
    where = {k: list(v) if isinstance(v, tuple) else v for k, v in where.items()}

    return CTDVerification(False, {"condition": condition, **where})


def interval_restriction_identity(
    d: CanonicalTreeDecomposition, family: Sequence[Sequence[int]], j: int
) -> bool:
    """interval_restriction_identity I(x_{s_i} - y_empty) = y_{s_i|j} for a plegma family

    I is the interval from the smallest to the largest index in the supports of the
    y_{s_i|j}. Vacuously true when all of them vanish.
    """
    family = [FinSubset(s) for s in family]
    levels = [d.node(s.initial(j)) for s in family]
    support = [i for v in levels for i in v.keys()]

    if not support:
        return True

    lo, hi = min(support), max(support)

    for s, ys in zip(family, levels):
        restricted = (d.x(s) - d.root()).restrict(lambda i: lo <= i <= hi)

        if restricted != ys:
            return False

    return True


def verify_ctd(
    d: CanonicalTreeDecomposition,
    x: Optional[Callable[[FinSubset], SparseVec]] = None,
    l: int = 3,  # noqa: E741
) -> CTDVerification:
    """verify_ctd Check a canonical tree decomposition and the consequences of its definition

    With x given, x_s = sum_j y_{s|j} is checked on [L]^k. Then the branch, plegma and cross
    ordering conditions, and the derived properties: (y_{s|j})_j is a block sequence, every
    level is plegma block, x_s - y_empty is plegma disjointly supported and the interval
    restriction identity holds on plegma l-tuples.

    Returns:
        CTDVerification: ok, or the first violated condition
    """
    k, universe = d.k, d.universe
    checked = {
        "sum": 0, "branch": 0, "plegma": 0, "cross": 0, "disjoint": 0, "interval": 0
    }
    subsets = list(k_subsets(universe, k))

    for s in subsets:
        if x is not None:
            checked["sum"] += 1

            if x(s) != d.x(s):
                return _fail("sum", s=s)

        for j1 in range(1, k):
            for j2 in range(j1 + 1, k + 1):
                checked["branch"] += 1

                if not blocks_ordered(
                    _supp(d.node(s.initial(j1))), _supp(d.node(s.initial(j2)))
                ):
                    return _fail("branch", s=s, levels=[j1, j2])

    pairs = list(enumerate_plegma(universe, k, 2))

    for s1, s2 in pairs:
        for j1 in range(1, k + 1):
            for j2 in range(j1, k + 1):
                checked["plegma"] += 1

                if not blocks_ordered(
                    _supp(d.node(s1.initial(j1))), _supp(d.node(s2.initial(j2)))
                ):
                    return _fail("plegma", pair=[list(s1), list(s2)], levels=[j1, j2])

                if j1 < j2:
                    checked["cross"] += 1

                    if not blocks_ordered(
                        _supp(d.node(s2.initial(j1))), _supp(d.node(s1.initial(j2)))
                    ):
                        return _fail(
                            "cross", pair=[list(s1), list(s2)], levels=[j1, j2]
                        )

    root = d.root()

    for s1, s2 in pairs:
        checked["disjoint"] += 1

        if (d.x(s1) - root).keys() & (d.x(s2) - root).keys():
            return _fail("disjoint", pair=[list(s1), list(s2)])

    if len(universe) <= 12:
        for family in enumerate_plegma(universe, k, l):
            for j in range(1, k + 1):
                checked["interval"] += 1

                if not interval_restriction_identity(d, family, j):
                    return _fail("interval", family=[list(s) for s in family], level=j)

    logger.debug(f"Canonical tree checks passed: {checked}")

    return CTDVerification(True, None, checked)
