from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from plegmalab.core.finset import FinSubset
from plegmalab.core.plegmatic import greedy_blocks, is_schreier_plegmatic
from plegmalab.norms.base import NormEngine, NormValue, sqrt_fraction
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidFunctional, InvalidInput, ScaleRefusal
from plegmalab.util.types import Number, to_fraction

MODES = ("exact", "greedy")
DEFAULT_EXACT_BOUND = 12


@lru_cache(maxsize=None)
def _feasible(family: Tuple[FinSubset, ...]) -> Tuple[bool, int]:
    res = greedy_blocks(family, schreier=True)

    return res.feasible, max(res.padding, default=0)


def schreier_feasible(family: Iterable[Sequence[int]]) -> bool:
    """Cached Schreier plegmatic test on a family of (k+1)-sets"""
    return _feasible(tuple(sorted(FinSubset(s) for s in family)))[0]


@dataclass
class FunctionalAtom:
    """mu * sum_{s in family} sign(s) e*_s"""

    weight: Fraction
    family: Tuple[FinSubset, ...]
    signs: Dict[FinSubset, int] = field(default_factory=dict)

    def sign(self, s: FinSubset) -> int:
        return self.signs.get(s, 1)

    def apply(self, x: SparseVec) -> Fraction:
        return self.weight * sum(
            (self.sign(s) * x[s] for s in self.family), Fraction(0)
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "weight": str(self.weight),
            "family": [list(s) for s in self.family],
            "signs": [self.sign(s) for s in self.family],
        }


@dataclass
class WFunctional:
    """WFunctional An element f = sum_i lambda_i f_i of the norming set

    Each f_i is a signed indicator functional of a Schreier plegmatic family, the families are
    pairwise disjoint and sum lambda_i^2 <= 1. The coefficients are stored as
    lambda_i = mu_i / sqrt(scale_sq) with rational mu_i, so that f(x) = N / sqrt(scale_sq) with
    an exact rational N.

    Raises:
        InvalidFunctional: An invariant is violated
    """

    atoms: List[FunctionalAtom] = field(default_factory=list)
    scale_sq: Fraction = Fraction(1)

    def __post_init__(self):
        self.scale_sq = to_fraction(self.scale_sq)
        self.validate()

    @classmethod
    def from_parts(
        cls,
        families: Sequence[Iterable[Sequence[int]]],
        weights: Sequence[Number],
        scale_sq: Number = 1,
        signs: Optional[Sequence[Sequence[int]]] = None,
    ) -> "WFunctional":
        atoms = []

        for i, (fam, w) in enumerate(zip(families, weights)):
            fam_t = tuple(sorted(FinSubset(s) for s in fam))
            sg = {} if signs is None else dict(zip(fam_t, signs[i]))
            atoms.append(FunctionalAtom(to_fraction(w), fam_t, sg))

        return cls(atoms=atoms, scale_sq=to_fraction(scale_sq))

    def validate(self) -> None:
        if self.scale_sq <= 0:
            raise InvalidFunctional("scale_sq must be positive")

        seen: Dict[FinSubset, int] = {}

        for i, atom in enumerate(self.atoms):
            if any(sg not in (-1, 1) for sg in atom.signs.values()):
                raise InvalidFunctional("Signs must be +1 or -1")

            for s in atom.family:
                if s in seen:
                    raise InvalidFunctional(
                        f"Families {seen[s]} and {i} overlap at {tuple(s)}"
                    )

                seen[s] = i

            if atom.family and not schreier_feasible(atom.family):
                raise InvalidFunctional(
                    f"Family {[tuple(s) for s in atom.family]} is not Schreier plegmatic"
                )

        weight_sq = sum((a.weight * a.weight for a in self.atoms), Fraction(0))

        if weight_sq > self.scale_sq:
            raise InvalidFunctional(
                f"sum lambda_i^2 = {weight_sq / self.scale_sq} exceeds 1"
            )

    def numerator(self, x: SparseVec) -> Fraction:
        return sum((a.apply(x) for a in self.atoms), Fraction(0))

    def lambdas(self) -> List[float]:
        return [float(a.weight) / sqrt_fraction(self.scale_sq) for a in self.atoms]

    def to_json(self) -> Dict[str, Any]:
        return {
            "scale_sq": str(self.scale_sq), "atoms": [a.to_json() for a in self.atoms]
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "WFunctional":
        try:
            return cls.from_parts(
                families=[a["family"] for a in data["atoms"]],
                weights=[a["weight"] for a in data["atoms"]],
                scale_sq=data.get("scale_sq", 1),
                signs=[a.get("signs", [1] * len(a["family"])) for a in data["atoms"]],
            )
        except (KeyError, TypeError) as exc:
            raise InvalidFunctional(f"Malformed functional: {exc}")


def w_functional_eval(f: WFunctional, x: SparseVec) -> NormValue:
    """w_functional_eval f(x) = sum_i lambda_i sum_{s in P_i} sign(s) x(s)

    The exact square is kept when f(x) >= 0, so norming comparisons can be made exactly.

    Examples:
        >>> x = SparseVec({(1, 3): 1, (2, 4): 1})
        >>> f = WFunctional.from_parts([[(1, 3)], [(2, 4)]], [1, 1], scale_sq=2)
        >>> w_functional_eval(f, x).square
        Fraction(2, 1)
    """
    f.validate()
    num = f.numerator(x)
    sq = num * num / f.scale_sq
    value = sqrt_fraction(sq)

    return NormValue(
        value=value if num >= 0 else -value, square=sq if num >= 0 else None
    )


@dataclass
class PartitionSearch:
    best_sq: Fraction = Fraction(0)
    best_blocks: List[List[FinSubset]] = field(default_factory=list)
    nodes: int = 0


def _exact_partition(
    points: List[FinSubset], masses: Dict[FinSubset, Fraction]
) -> PartitionSearch:
    order = sorted(points, key=lambda s: (-masses[s], s))
    suffix = [Fraction(0)] * (len(order) + 1)

    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + masses[order[i]]

    search = PartitionSearch()
    blocks: List[List[FinSubset]] = []
    block_mass: List[Fraction] = []

    def branch(pos: int, acc: Fraction) -> None:
        search.nodes += 1

        if pos == len(order):
            if acc > search.best_sq or not search.best_blocks:
                search.best_sq = acc
                search.best_blocks = [list(b) for b in blocks]

            return

        top = max(block_mass, default=Fraction(0))
        rem = suffix[pos]

        if search.best_blocks and acc + (top + rem) ** 2 - top ** 2 <= search.best_sq:
            return

        s = order[pos]
        ms = masses[s]

        for b in range(len(blocks)):
            candidate = tuple(sorted(blocks[b] + [s]))

            if not _feasible(candidate)[0]:
                continue

            old = block_mass[b]
            blocks[b].append(s)
            block_mass[b] = old + ms
            branch(pos + 1, acc - old * old + block_mass[b] ** 2)
            blocks[b].pop()
            block_mass[b] = old

        blocks.append([s])
        block_mass.append(ms)
        branch(pos + 1, acc + ms * ms)
        blocks.pop()
        block_mass.pop()

    branch(0, Fraction(0))

    return search


def _greedy_partition(
    points: List[FinSubset], masses: Dict[FinSubset, Fraction]
) -> List[List[FinSubset]]:
    blocks: List[List[FinSubset]] = []

    for s in sorted(points, key=lambda s: (-masses[s], s)):
        for b in blocks:
            if _feasible(tuple(sorted(b + [s])))[0]:
                b.append(s)

                break
        else:
            blocks.append([s])

    return blocks


def _certificate(x: SparseVec, blocks: List[List[FinSubset]]) -> WFunctional:
    masses = [sum((abs(x[s]) for s in b), Fraction(0)) for b in blocks]
    scale = sum((m * m for m in masses), Fraction(0))
    signs = [[1 if x[s] > 0 else -1 for s in sorted(b)] for b in blocks]

    return WFunctional.from_parts(
        blocks, masses, scale_sq=scale if scale > 0 else 1, signs=signs
    )


def schreier_plegmatic_eval(
    k: int, x: SparseVec, mode: str = "exact", exact_bound: int = DEFAULT_EXACT_BOUND
) -> NormValue:
    """schreier_plegmatic_eval Norm of x in the Schreier plegmatic space over [N]^{k+1}

        ||x|| = sup (sum_i ||P_i x||_1^2)^(1/2)

    over pairwise disjoint Schreier plegmatic families P_i. Exact mode runs a branch and bound
    over set partitions of supp(x): points are placed heaviest first, every block stays
    Schreier plegmatic, and a branch is cut when pouring all the remaining mass into its
    heaviest block cannot beat the best partition. Greedy mode packs first fit and reports
    the l1 norm as upper bound.

    Args:
        k (int): Vectors are indexed by (k+1)-sets
        x (SparseVec): The vector
        mode (str): "exact" or "greedy"
        exact_bound (int): Largest support handled in exact mode

    Raises:
        ScaleRefusal: Exact mode on a support larger than exact_bound

    Returns:
        NormValue: exact square and a norming WFunctional as certificate

    Examples:
        >>> schreier_plegmatic_eval(1, SparseVec({(2, 4): 1, (3, 5): 1})).value
        2.0
    """
    if mode not in MODES:
        raise InvalidInput(f"Unknown mode '{mode}'. Use one of {MODES}")

    if x and x.arity != k + 1:
        raise InvalidInput(
            f"Expected a vector indexed by {k + 1}-sets, got arity {x.arity}"
        )

    points = [FinSubset(s) for s in x.support()]
    masses = {s: abs(x[s]) for s in points}

    if not points:
        return NormValue.rational(Fraction(0))

    if mode == "exact":
        if len(points) > exact_bound:
            raise ScaleRefusal(
                f"Support of size {len(points)} exceeds the exact bound {exact_bound}. "
                "Use mode='greedy' for certified bounds"
            )

        search = _exact_partition(points, masses)
        logger.debug(f"Partition search visited {search.nodes} nodes")
        blocks = search.best_blocks
        value = NormValue.from_square(search.best_sq)
    else:
        blocks = _greedy_partition(points, masses)
        sq = sum(
            (sum((masses[s] for s in b), Fraction(0)) ** 2 for b in blocks), Fraction(0)
        )
        value = NormValue.from_square(sq, is_exact=False, upper_bound=float(x.l1()))

    value.certificate = _certificate(x, blocks)

    return value


def padding_used(certificate: WFunctional) -> int:
    """Largest number of padding integers any block of the certificate needs"""
    return max((_feasible(a.family)[1] for a in certificate.atoms), default=0)


def verify_family(
    family: Iterable[Sequence[int]], max_pad: Optional[int] = None
) -> bool:
    """Exhaustive cross-check of a certificate family"""
    return is_schreier_plegmatic(family, max_pad=max_pad).feasible


class SchreierPlegmaticNorm(NormEngine):
    name = "schreier_plegmatic"

    def __init__(
        self, k: int = 1, mode: str = "exact", exact_bound: int = DEFAULT_EXACT_BOUND
    ):
        if k < 1:
            raise InvalidInput("k must be positive")

        self.k = k
        self.mode = mode
        self.exact_bound = exact_bound

    @property
    def params(self) -> Dict[str, Any]:
        return {"k": self.k, "mode": self.mode, "exact_bound": self.exact_bound}

    def evaluate(self, x: SparseVec) -> NormValue:
        return schreier_plegmatic_eval(
            self.k, x, mode=self.mode, exact_bound=self.exact_bound
        )
