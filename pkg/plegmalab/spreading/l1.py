from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from loguru import logger

from plegmalab.core.finset import Universe
from plegmalab.sequences.kseq import KSeqGen, additivity_violation
from plegmalab.spreading.estimate import Coeffs, coefficient_grid, empirical_sm
from plegmalab.util.errors import InvalidInput


@dataclass
class L1Estimate:
    """Smallest empirical value of ||sum a_j x_{s_j}|| over the l1 sphere grid"""

    c: float
    argmin: Optional[Coeffs]
    l: int  # noqa: E741
    q: int
    horizon: int
    tuples: int
    largest: float = 0.0

    def to_json(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "argmin": None if self.argmin is None else [str(a) for a in self.argmin],
            "l": self.l,
            "q": self.q,
            "horizon": self.horizon,
            "tuples": self.tuples,
            "largest": self.largest,
        }


def l1_constant(
    gen: KSeqGen,
    universe: Universe,
    l: int,  # noqa: E741
    q: int = 4,
    horizon: int = 12,
) -> L1Estimate:
    """l1_constant Lower l1 constant of the spreading model, read off a grid

    The minimum over the grid {a : sum |a_i| = 1, a_i in (1/q)Z} of the smallest value over the
    admissible plegma l-tuples. Exact for the tested coefficients, so the best l1 constant
    at this level and horizon can only be smaller.

    Args:
        gen (KSeqGen): The k-sequence
        universe (Universe): M
        l (int): Level and tuple length
        q (int): Grid resolution
        horizon (int): Largest index considered

    Returns:
        L1Estimate: c (inf when nothing is admissible), the minimizing tuple and the largest
            value seen
    """
    grid = coefficient_grid(l, q, sphere=True)
    est = empirical_sm(gen, universe, l, l, grid, horizon, grid=f"l1 sphere q={q}")

    if est.empty:
        return L1Estimate(float("inf"), None, l, q, horizon, 0)

    argmin = min(est.stats, key=lambda a: est.stats[a].min)
    largest = max(s.max for s in est.stats.values())

    return L1Estimate(est.stats[argmin].min, argmin, l, q, horizon, est.tuples, largest)


@dataclass
class SplittingReport:
    """SplittingReport l1 constants of x = x1 + x2 and the triangle inequality bound

    implied is c(x) minus the largest value of x2 on the grid, a lower bound for c(x1).
    """

    x: L1Estimate
    x1: L1Estimate
    x2: L1Estimate
    implied: float
    holds: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "x": self.x.to_json(),
            "x1": self.x1.to_json(),
            "x2": self.x2.to_json(),
            "implied": self.implied,
            "holds": self.holds,
        }

    def table(self) -> List[List[Any]]:
        return [
            [name, est.c, est.largest, est.tuples]
            for name, est in (("x", self.x), ("x1", self.x1), ("x2", self.x2))
        ]


SPLIT_HEADER = ["sequence", "c", "largest", "tuples"]


def splitting_check(
    x: KSeqGen,
    x1: KSeqGen,
    x2: KSeqGen,
    universe: Universe,
    l: int,  # noqa: E741
    q: int = 4,
    horizon: int = 12,
    tol: float = 1e-12,
) -> SplittingReport:
    """splitting_check Check that a lower l1 estimate of x passes to x1 when x2 is small

    For every tuple, ||sum a_j x1_{s_j}|| >= ||sum a_j x_{s_j}|| - ||sum a_j x2_{s_j}||, hence
    c(x1) >= c(x) - max ||sum a_j x2_{s_j}||.

    Raises:
        InvalidInput: x_s != x1_s + x2_s for some s below the horizon
    """
    bad = additivity_violation(x, x1, x2, universe.truncate(horizon))

    if bad is not None:
        raise InvalidInput(f"x_s != x1_s + x2_s at s={tuple(bad)}")

    cx, cx1, cx2 = (
        l1_constant(g, universe, l, q=q, horizon=horizon) for g in (x, x1, x2)
    )
    implied = cx.c - cx2.largest
    holds = cx1.c >= implied - tol

    if not holds:
        logger.error(f"Splitting bound failed: c(x1)={cx1.c} < {implied}")

    return SplittingReport(cx, cx1, cx2, implied, holds)
