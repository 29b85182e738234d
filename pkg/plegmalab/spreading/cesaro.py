import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Any, Dict, Iterable, List, Optional

from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, k_subsets
from plegmalab.norms.schreier import WFunctional
from plegmalab.norms.sparse import SparseVec
from plegmalab.sequences.kseq import KSeqGen
from plegmalab.util.errors import InvalidInput, ScaleRefusal


def cesaro_mean(gen: KSeqGen, universe: Universe, n: int) -> SparseVec:
    """cesaro_mean C(n, k)^{-1} sum_{s in [M|n]^k} x_s, exactly

    Examples:
        >>> from plegmalab.sequences.kseq import xk_basis
        >>> sorted(cesaro_mean(xk_basis(1), Universe.naturals(), 3).values())
        [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)]
    """
    if n < gen.k:
        raise InvalidInput(
            f"The Cesaro mean of a {gen.k}-sequence needs n >= {gen.k}, got {n}"
        )

    head = Universe.explicit(universe.first(n))
    total = SparseVec()

    for s in k_subsets(head, gen.k):
        total += gen.vec(s)

    return total * Fraction(1, comb(n, gen.k))


def paper_functional(universe: Universe, k: int, n: int) -> WFunctional:
    """paper_functional Indicator functional of F_1 x ... x F_{k+1}, F_i = {M(in+1), ..., M((i+1)n)}

    The product family is plegmatic with blocks of size n and min F_1 > n, so it is Schreier
    plegmatic and the functional has norm 1 on the (k+1)-sets.
    """
    blocks = [
        [universe.at(i * n + r) for r in range(1, n + 1)] for i in range(1, k + 2)
    ]
    family = [FinSubset(s) for s in itertools.product(*blocks)]

    return WFunctional.from_parts([family], [1])


def paper_functional_value(k: int, n: int) -> Fraction:
    """n^{k+1} / C((k+2)n, k+1)"""
    return Fraction(n ** (k + 1), comb((k + 2) * n, k + 1))


def cesaro_limit(k: int) -> Fraction:
    """(k+1)! / (k+2)^{k+1}, the limit of paper_functional_value(k, n)"""
    return Fraction(factorial(k + 1), (k + 2) ** (k + 1))


@dataclass
class CesaroRow:
    n: int
    norm: Optional[float]
    functional: Optional[Fraction] = None
    analytic: Optional[Fraction] = None

    def cells(self) -> List[Any]:
        return [
            self.n,
            "" if self.norm is None else self.norm,
            "" if self.functional is None else str(self.functional),
            "" if self.analytic is None else str(self.analytic),
            "" if self.functional is None else float(self.functional),
        ]


@dataclass
class CesaroTrace:
    """CesaroTrace Ambient norms of the k-Cesaro means along n, with optional functional values"""

    universe: Universe
    k: int
    rows: List[CesaroRow] = field(default_factory=list)
    limit: Optional[Fraction] = None

    def table(self) -> List[List[Any]]:
        return [r.cells() for r in self.rows]

    def series(self) -> Dict[str, List[float]]:
        out: Dict[str, List[float]] = {"n": [r.n for r in self.rows]}
        out["norm"] = [float("nan") if r.norm is None else r.norm for r in self.rows]

        if any(r.functional is not None for r in self.rows):
            out["functional"] = [float(r.functional or 0) for r in self.rows]

        return out

    def to_json(self) -> Dict[str, Any]:
        return {
            "universe": self.universe.describe(),
            "k": self.k,
            "limit": None if self.limit is None else str(self.limit),
            "rows": [
                {
                    "n": r.n,
                    "norm": r.norm,
                    "functional": None if r.functional is None else str(r.functional),
                    "analytic": None if r.analytic is None else str(r.analytic),
                }
                for r in self.rows
            ],
        }


CESARO_HEADER = ["n", "norm", "functional", "analytic", "functional_float"]
FUNCTIONALS = ("paper",)


def cesaro_scan(
    gen: KSeqGen,
    universe: Universe,
    n_range: Iterable[int],
    functionals: Optional[str] = None,
) -> CesaroTrace:
    """cesaro_scan Norms of the Cesaro means for a range of n

    With functionals="paper", gen must be a (k+1)-sequence in the Schreier plegmatic space and
    f_n(y_n) is evaluated on the mean y_n over [M|(k+2)n]^{k+1}, next to the closed form
    n^{k+1} / C((k+2)n, k+1). Norms are left empty for n < gen.k and when the ambient engine
    refuses to compute them exactly.

    Args:
        gen (KSeqGen): The k-sequence
        universe (Universe): M
        n_range (Iterable[int]): Values of n, each >= gen.k
        functionals (Optional[str]): None or "paper"

    Returns:
        CesaroTrace: One row per n
    """
    if functionals is not None and functionals not in FUNCTIONALS:
        raise InvalidInput(
            f"Unknown functionals '{functionals}'. Use one of {FUNCTIONALS}"
        )

    if functionals and gen.k < 2:
        raise InvalidInput(
            "The block indicator functionals act on (k+1)-sequences with k >= 1"
        )

    k = gen.k - 1 if functionals else gen.k
    trace = CesaroTrace(universe, gen.k, limit=cesaro_limit(k) if functionals else None)

    for n in n_range:
        norm: Optional[float] = None

        try:
            if n >= gen.k:
                norm = gen.norm(cesaro_mean(gen, universe, n))
        except ScaleRefusal as exc:
            logger.warning(f"Norm of the Cesaro mean at n={n} skipped: {exc}")

        row = CesaroRow(n, norm)

        if functionals == "paper":
            wide = cesaro_mean(gen, universe, (k + 2) * n)
            row.functional = paper_functional(universe, k, n).numerator(wide)
            row.analytic = paper_functional_value(k, n)

        trace.rows.append(row)
        logger.debug(f"Cesaro n={n}: norm={norm}, functional={row.functional}")

    return trace
