from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Set, Tuple

from loguru import logger

from plegmalab.core.finset import FinSubset, Universe
from plegmalab.norms.base import NormEngine
from plegmalab.norms.sparse import SparseVec
from plegmalab.sequences.kseq import (
    BlockData,
    KSeqGen,
    compose_seq,
    composition_tolerance,
)
from plegmalab.spreading.estimate import (
    admissible_tuples,
    coefficient_grid,
    empirical_sm,
)


@dataclass
class CompositionReport:
    """CompositionReport Empirical values of the composed sequence against the direct values

    C bounds ||x_s||, K bounds ||y_t|| in the spreading model space, delta is the measured
    width of the spreading model of x on the combinations the composition produces.
    """

    C: float
    K: float
    delta: float
    tolerance: float
    max_discrepancy: float
    rows: List[List[Any]]

    @property
    def consistent(self) -> bool:
        return self.max_discrepancy <= self.tolerance + 1e-12

    def to_json(self) -> Dict[str, Any]:
        return {
            "C": self.C,
            "K": self.K,
            "delta": self.delta,
            "tolerance": self.tolerance,
            "max_discrepancy": self.max_discrepancy,
            "consistent": self.consistent,
        }


COMPOSITION_HEADER = ["tuple", "coeffs", "composed", "direct", "discrepancy"]


def composition_consistency(
    x: KSeqGen,
    y_data: BlockData,
    space: NormEngine,
    universe: Universe,
    l: int = 2,  # noqa: E741
    q: int = 2,
    horizon: int = 12,
    d: int = 1,
) -> CompositionReport:
    """composition_consistency Compare ||sum a_i z_{v_i}|| with ||sum a_i y_{t_i}|| in the spreading model space

    z = compose_seq(x, y, d). For every admissible plegma l-tuple (v_i) of [M]^{k+d} and every
    a on the l^infinity grid, the composed value is evaluated in the ambient space of x and
    the direct value in space, the space of the spreading model of x, at the first d
    coordinates t_i of the v_i. The two must agree within (1 + 2CK) delta.

    Args:
        x (KSeqGen): Inner k-sequence
        y_data (BlockData): t -> (F_t, coefficients), vectors of the spreading model space
        space (NormEngine): Norm of the spreading model of x
        universe (Universe): M, chosen so that the shifted copies x_{s+j} never collide
        l (int): Tuple length
        q (int): Grid resolution
        horizon (int): Largest index considered
        d (int): Arity of y

    Returns:
        CompositionReport: Measured constants, tolerance and the per tuple comparison
    """
    z = compose_seq(x, y_data, d)
    tuples = admissible_tuples(z, universe, l, l, horizon)
    grid = coefficient_grid(l, q)

    def y_vec(t: FinSubset) -> SparseVec:
        support, coeffs = y_data(t)

        return SparseVec(zip(support, coeffs))

    C = x.bound(universe.truncate(horizon))
    K = max((space(y_vec(FinSubset(v[:d]))) for t in tuples for v in t), default=0.0)
    patterns: Dict[int, Set[Tuple[Fraction, ...]]] = defaultdict(set)

    for t in tuples:
        blocks = [y_data(FinSubset(v[:d]))[1] for v in t]

        for a in grid:
            pattern = tuple(ai * c for ai, cs in zip(a, blocks) for c in cs)
            patterns[len(pattern)].add(pattern)

    # the x-combinations inside z use shifted sets, which need not lie in M
    naturals = Universe.naturals()
    estimates = [
        empirical_sm(x, naturals, m, m, sorted(p), horizon, grid="composition")
        for m, p in patterns.items()
    ]
    delta = max((e.width for e in estimates), default=0.0)
    tol = composition_tolerance(C, K, delta)
    rows: List[List[Any]] = []
    worst = 0.0

    for t in tuples:
        for a in grid:
            composed = z.norm(z.combination(a, t))
            direct_vec = SparseVec()

            for coeff, v in zip(a, t):
                direct_vec += y_vec(FinSubset(v[:d])) * coeff

            direct = space(direct_vec)
            gap = abs(composed - direct)
            worst = max(worst, gap)
            rows.append(
                [str(t.to_json()), " ".join(str(c) for c in a), composed, direct, gap]
            )

    logger.info(
        f"Composition: C={C}, K={K}, delta={delta}, largest gap {worst} (tolerance {tol})"
    )

    return CompositionReport(C, K, delta, tol, worst, rows)
