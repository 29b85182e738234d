from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, blocks_ordered, k_subsets
from plegmalab.core.plegma import PlegmaTuple, enumerate_plegma
from plegmalab.norms.base import NormEngine
from plegmalab.norms.classical import C0Norm, LpNorm
from plegmalab.norms.schreier import SchreierPlegmaticNorm
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidInput
from plegmalab.util.types import Number, to_fraction

VecFn = Callable[[FinSubset], SparseVec]


@dataclass
class KSeqGen:
    """KSeqGen A k-sequence s -> x_s of finitely supported vectors in an ambient normed space

    Vectors are produced lazily and memoized.

    Args:
        k (int): Arity, x is indexed by k-subsets of N
        ambient (NormEngine): Norm of the space the vectors live in
        fn (VecFn): s -> x_s
        name (str): Registry name or a description of the construction
        params (Dict[str, Any]): Construction parameters, echoed into manifests
    """

    k: int
    ambient: NormEngine
    fn: VecFn
    name: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)
    _cache: Dict[FinSubset, SparseVec] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput("k-sequences need k >= 1")

    def vec(self, s: Sequence[int]) -> SparseVec:
        s = FinSubset(s)

        if len(s) != self.k:
            raise InvalidInput(
                f"{self.name} is indexed by {self.k}-sets, got {tuple(s)}"
            )

        if s not in self._cache:
            self._cache[s] = self.fn(s)

        return self._cache[s]

    __call__ = vec

    def combination(
        self, coeffs: Sequence[Number], family: Sequence[Sequence[int]]
    ) -> SparseVec:
        """sum_j a_j x_{s_j}"""
        total = SparseVec()

        for a, s in zip(coeffs, family):
            total += self.vec(s) * to_fraction(a)

        return total

    def norm(self, v: SparseVec) -> float:
        return self.ambient(v)

    def bound(self, universe: Universe) -> float:
        """Largest ambient norm of x_s over [M]^k for a finite M (the constant C)"""
        return max(
            (self.norm(self.vec(s)) for s in k_subsets(universe, self.k)), default=0.0
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "generator": self.name,
            "k": self.k,
            "ambient": self.ambient.describe(),
            **self.params,
        }


def basis_seq(space: NormEngine, name: str = "basis") -> KSeqGen:
    """basis_seq The unit vector basis s -> e_s of a space indexed by [N]^{k+1}

    Engines with a k parameter (Schreier plegmatic, example norm) act on vectors indexed by
    (k+1)-sets. Every other engine acts on c00(N), where this is n -> e_n.

    Examples:
        >>> basis_seq(SchreierPlegmaticNorm(1))((2, 4)) == SparseVec.unit((2, 4))
        True
    """
    space_k = getattr(space, "k", 0)

    if space_k == 0:
        return KSeqGen(1, space, lambda s: SparseVec.unit(s[0]), name=name)

    return KSeqGen(
        space_k + 1,
        space,
        lambda s: SparseVec.unit(tuple(s)),
        name=name,
        params={"space_k": space_k},
    )


def xk_basis(k: int = 1, mode: str = "exact") -> KSeqGen:
    """Basis of the Schreier plegmatic space over [N]^{k+1}, as a (k+1)-sequence"""
    return basis_seq(SchreierPlegmaticNorm(k, mode=mode), name="xk_basis")


def first_row_seq(k: int = 1) -> KSeqGen:
    """first_row_seq n -> e_{(1, n+1, ..., n+k)}, a 1-sequence in the Schreier plegmatic space

    Two of these vectors never share a Schreier plegmatic family (the first block would
    contain 1 and have two elements), so the sequence is isometrically l2.
    """
    return KSeqGen(
        1,
        SchreierPlegmaticNorm(k),
        lambda s: SparseVec.unit((1,) + tuple(s[0] + i for i in range(1, k + 1))),
        name="xk_first_row",
        params={"space_k": k},
    )


def summing_2seq() -> KSeqGen:
    """x_s = e_{min s} + ... + e_{max s} in c0

    Examples:
        >>> summing_2seq()((2, 5)).support()
        [2, 3, 4, 5]
    """
    return KSeqGen(
        2,
        C0Norm(),
        lambda s: SparseVec((n, 1) for n in range(s[0], s[1] + 1)),
        name="summing",
    )


def unit_rows(n: int, m: int) -> Fraction:
    return Fraction(1 if n == m else 0)


def summing_rows(n: int, m: int) -> Fraction:
    return Fraction(1 if m >= n else 0)


BASE_ROWS = {"units": unit_rows, "summing": summing_rows}


def c0_truncation_2seq(
    base: Callable[[int, int], Number], name: str = "c0_truncation"
) -> KSeqGen:
    """c0_truncation_2seq x_s = the row s(1) of base, cut after coordinate s(2)

    Args:
        base (Callable[[int, int], Number]): (n, m) -> e_n(m)
    """
    return KSeqGen(
        2,
        C0Norm(),
        lambda s: SparseVec((m, base(s[0], m)) for m in range(1, s[1] + 1)),
        name=name,
    )


def constant_seq(v: SparseVec, k: int, ambient: NormEngine) -> KSeqGen:
    """x_s = v for every s (a trivial spreading sequence)"""
    return KSeqGen(
        k,
        ambient,
        lambda s: SparseVec(v),
        name="constant",
        params={"vector": v.to_json()},
    )


def shifted_seq(x: KSeqGen, v: SparseVec) -> KSeqGen:
    """x_s - v"""
    return KSeqGen(
        x.k,
        x.ambient,
        lambda s: x.vec(s) - v,
        name=f"{x.name}-shifted",
        params=dict(x.params),
    )


def lift_seq(w: KSeqGen, k2: int) -> KSeqGen:
    """lift_seq x_s = w_{s|k1} for s in [N]^{k2}

    Raises:
        InvalidInput: k2 <= k1
    """
    if k2 <= w.k:
        raise InvalidInput(f"Lifting needs k2 > k1={w.k}, got {k2}")

    return KSeqGen(
        k2,
        w.ambient,
        lambda s: w.vec(s.initial(w.k)),
        name=f"{w.name}-lift{k2}",
        params={**w.params, "lifted_from": w.k},
    )


# t -> (F_t, coefficients of y_t on F_t)
BlockData = Callable[[FinSubset], Tuple[FinSubset, Sequence[Fraction]]]


def pair_blocks(t: FinSubset) -> Tuple[FinSubset, List[Fraction]]:
    """y_t = e_{2t(1)-1} + e_{2t(1)} for 1-sets t"""
    return FinSubset([2 * t[0] - 1, 2 * t[0]]), [Fraction(1), Fraction(1)]


def compose_seq(
    x: KSeqGen, y_data: BlockData, d: int, check_horizon: int = 8
) -> KSeqGen:
    """compose_seq Plug the k-sequence x into the supports of a d-sequence y

    For v in [N]^{k+d} split v = t_v U s_v with |t_v| = d and t_v < s_v. With y_{t_v} given by
    its support F and coefficients a_{F(j)},

        z_v = sum_j a_{F(j)} x_{s_v + j - 1}

    where s + c shifts every element of s by c.

    y must be a plegma block sequence. This is checked on every plegma pair of
    [{1, ..., check_horizon}]^d before z is built.

    Args:
        x (KSeqGen): Inner k-sequence
        y_data (BlockData): t -> (F_t, coefficients)
        d (int): Arity of y
        check_horizon (int): Horizon of the plegma block check on y

    Raises:
        InvalidInput: d < 1, y_t with mismatched support and coefficients, or y not a plegma
            block sequence on the checked pairs

    Returns:
        KSeqGen: z of arity k + d
    """
    if d < 1:
        raise InvalidInput("d must be positive")

    def block(t: FinSubset) -> Tuple[FinSubset, Sequence[Fraction]]:
        support, coeffs = y_data(t)

        if len(coeffs) != len(support):
            raise InvalidInput(
                f"y_{tuple(t)} has {len(support)} support points "
                f"but {len(coeffs)} coefficients"
            )

        return support, coeffs

    y = KSeqGen(d, x.ambient, lambda t: SparseVec(zip(*block(t))), name="y")
    horizon = max(check_horizon, 2 * d)

    if not is_plegma_block(y, Universe.horizon(horizon)):
        raise InvalidInput(f"y is not a plegma block sequence on [1..{horizon}]^{d}")

    def z(v: FinSubset) -> SparseVec:
        t_v, s_v = FinSubset(v[:d]), FinSubset(v[d:])
        _, coeffs = block(t_v)
        total = SparseVec()

        for j, a in enumerate(coeffs):
            if a != 0:
                total += x.vec(s_v.shift(j)) * a

        return total

    return KSeqGen(
        x.k + d,
        x.ambient,
        z,
        name=f"compose({x.name})",
        params={"inner": x.describe(), "d": d},
    )


def composition_tolerance(C: float, K: float, delta: float) -> float:
    """(1 + 2 C K) delta, the gap allowed between composed and direct values"""
    return (1 + 2 * C * K) * delta


def renorm_inner_tuples(s: Sequence[int], p: int, universe: Universe) -> PlegmaTuple:
    """(t_i^s)_{i=1}^p with t_i^s(j) = M(p s(j) + i - 1), a plegma p-tuple"""
    return PlegmaTuple(
        FinSubset(universe.at(p * n + i - 1) for n in s) for i in range(1, p + 1)
    )


def l1_renorm(
    x: KSeqGen,
    p: int,
    b: Sequence[Number],
    c: Number,
    eps_prime: Number,
    universe: Universe,
    eps: Optional[Number] = None,
) -> KSeqGen:
    """l1_renorm Average x along plegma p-tuples to push an l1 spreading model towards isometry

        y_s = (sum_{i=1}^p b_i x_{t_i^s}) / (c + 2 eps')

    Args:
        x (KSeqGen): The k-sequence
        p (int): Number of averaged vectors
        b (Sequence[Number]): Coefficients with sum |b_i| = 1
        c (Number): Lower l1 constant of the spreading model of x
        eps_prime (Number): Slack eps' > 0
        universe (Universe): M, used to build the inner tuples
        eps (Optional[Number]): Target eps, checked against (c - eps') / (c + 2 eps') >= 1 - eps.
            Without it the ratio is only logged and describe() reports checked=False

    Raises:
        InvalidInput: Violated parameter relations

    Returns:
        KSeqGen: y
    """
    coeffs = [to_fraction(v) for v in b]
    c, eps_prime = to_fraction(c), to_fraction(eps_prime)

    if p < 1 or len(coeffs) != p:
        raise InvalidInput(
            f"Need p >= 1 coefficients, got p={p} and {len(coeffs)} coefficients"
        )

    total = sum(abs(v) for v in coeffs)

    if total != 1:
        raise InvalidInput(f"Coefficients must satisfy sum |b_i| = 1, got {total}")

    if c <= 0 or eps_prime <= 0:
        raise InvalidInput("Need c > 0 and eps' > 0")

    ratio = (c - eps_prime) / (c + 2 * eps_prime)

    if eps is None:
        logger.warning(
            f"l1_renorm without a target eps, ratio {ratio} is left unchecked"
        )
    elif ratio < 1 - to_fraction(eps):
        raise InvalidInput(
            f"(c - eps') / (c + 2 eps') = {ratio} is below 1 - eps = {1 - to_fraction(eps)}"
        )

    scale = 1 / (c + 2 * eps_prime)

    def y(s: FinSubset) -> SparseVec:
        inner = renorm_inner_tuples(s, p, universe)

        return x.combination([a * scale for a in coeffs], inner)

    return KSeqGen(
        x.k,
        x.ambient,
        y,
        name=f"renorm({x.name})",
        params={
            "p": p,
            "b": [str(v) for v in coeffs],
            "c": str(c),
            "eps_prime": str(eps_prime),
            "ratio": str(ratio),
            "checked": eps is not None,
        },
    )


def _support_pairs(
    gen: KSeqGen, universe: Universe
) -> Iterable[Tuple[PlegmaTuple, SparseVec, SparseVec]]:
    for pair in enumerate_plegma(universe, gen.k, 2):
        yield pair, gen.vec(pair[0]), gen.vec(pair[1])


def is_plegma_block(gen: KSeqGen, universe: Universe) -> bool:
    """supp(x_{s1}) < supp(x_{s2}) for every plegma pair of [M]^k"""
    return all(
        blocks_ordered(a.keys(), b.keys()) for _, a, b in _support_pairs(gen, universe)
    )


def is_plegma_disjointly_supported(gen: KSeqGen, universe: Universe) -> bool:
    """supp(x_{s1}) and supp(x_{s2}) are disjoint for every plegma pair of [M]^k"""
    return all(not (a.keys() & b.keys()) for _, a, b in _support_pairs(gen, universe))


def additivity_violation(
    x: KSeqGen, x1: KSeqGen, x2: KSeqGen, universe: Universe
) -> Optional[FinSubset]:
    """First s in [M]^k with x_s != x1_s + x2_s"""
    for s in k_subsets(universe, x.k):
        if x.vec(s) != x1.vec(s) + x2.vec(s):
            return s

    return None


def _constant_generator(
    k: int = 1, vector: Optional[List[Dict[str, Any]]] = None, engine: str = "c0"
) -> KSeqGen:
    from plegmalab.norms.factory import make_engine

    v = SparseVec.from_json(vector) if vector else SparseVec.unit(1)

    return constant_seq(v, k, make_engine(engine))


SUPPORTED_GENERATORS: Dict[str, Callable[..., KSeqGen]] = {
    "xk_basis": xk_basis,
    "xk_first_row": first_row_seq,
    "summing": summing_2seq,
    "c0_units": lambda: c0_truncation_2seq(unit_rows, name="c0_units"),
    "c0_summing_rows": lambda: c0_truncation_2seq(summing_rows, name="c0_summing_rows"),
    "c0_basis": lambda: basis_seq(C0Norm(), "c0_basis"),
    "l1_basis": lambda: basis_seq(LpNorm(1), "l1_basis"),
    "l2_basis": lambda: basis_seq(LpNorm(2), "l2_basis"),
    "constant": _constant_generator,
}
"""Generators selectable by name in experiment configs"""


def make_generator(name: str, **params) -> KSeqGen:
    """make_generator Instantiate a registered k-sequence

    Args:
        name (str): One of SUPPORTED_GENERATORS
        **params: Passed to the construction (e.g. k for xk_basis)

    Raises:
        InvalidInput: Unknown name or parameters
    """
    if name not in SUPPORTED_GENERATORS:
        raise InvalidInput(
            f"The supported generators are {list(SUPPORTED_GENERATORS.keys())}. You provided {name}"
        )

    try:
        gen = SUPPORTED_GENERATORS[name](**params)
    except TypeError as exc:
        raise InvalidInput(f"Bad parameters for generator '{name}': {exc}")

    logger.debug(f"Generator {gen.describe()}")

    return gen
