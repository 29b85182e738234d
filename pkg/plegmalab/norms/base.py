import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidInput


def exact_sqrt(q: Fraction) -> Optional[Fraction]:
    """The rational square root of q, if there is one"""
    if q < 0:
        raise InvalidInput(f"Cannot take the square root of {q}")

    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)

    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)

    return None


def sqrt_fraction(q: Fraction) -> float:
    """sqrt_fraction Float square root of an exact square

    Equal rationals always give the same float.
    """
    root = exact_sqrt(q)

    if root is not None:
        return float(root)

    return math.sqrt(float(q))


@dataclass
class NormValue:
    """NormValue Result of a norm evaluation

    value is the reported float. When the value is rational it is also kept in exact, and
    squared norms are kept in square. For bounded computations the true norm lies in
    [value - error_bound, upper_bound].
    """

    value: float
    exact: Optional[Fraction] = None
    square: Optional[Fraction] = None
    error_bound: float = 0.0
    upper_bound: Optional[float] = None
    is_exact: bool = True
    certificate: Optional[Any] = None

    @classmethod
    def rational(cls, q: Fraction, **kwargs) -> "NormValue":
        return cls(value=float(q), exact=q, square=q * q, **kwargs)

    @classmethod
    def from_square(cls, sq: Fraction, **kwargs) -> "NormValue":
        return cls(value=sqrt_fraction(sq), exact=exact_sqrt(sq), square=sq, **kwargs)

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "value": self.value,
            "error_bound": self.error_bound,
            "is_exact": self.is_exact,
        }

        if self.exact is not None:
            out["exact"] = str(self.exact)

        if self.square is not None:
            out["square"] = str(self.square)

        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound

        if self.certificate is not None:
            cert = self.certificate
            out["certificate"] = cert.to_json() if hasattr(cert, "to_json") else cert

        return out


class NormEngine(metaclass=ABCMeta):
    """NormEngine An evaluable norm on finitely supported vectors

    Subclasses set name and implement evaluate. unconditional marks norms invariant under sign
    changes of the coordinates, which the example norm relies on for its support restriction.
    """

    name: str = "norm"
    unconditional: bool = True

    @property
    def params(self) -> Dict[str, Any]:
        return {}

    @abstractmethod
    def evaluate(self, x: SparseVec) -> NormValue:
        raise NotImplementedError

    def __call__(self, x: SparseVec) -> float:
        return self.evaluate(x).value

    def certify(self, x: SparseVec) -> Optional[Any]:
        """A dual witness for a lower bound of the norm of x, if the engine has one"""
        return self.evaluate(x).certificate

    def describe(self) -> Dict[str, Any]:
        return {"engine": self.name, **self.params}

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())

        return f"{self.__class__.__name__}({params})"


def seminorm_violations(
    engine: NormEngine,
    vectors: Iterable[SparseVec],
    scalars: Iterable[Fraction] = (Fraction(-2), Fraction(1, 3)),
    tol: float = 1e-9,
) -> List[Tuple[str, Any]]:
    """seminorm_violations Check homogeneity, the triangle inequality and sign invariance

    Triangle inequalities are checked on all pairs of the given vectors. Sign invariance is only
    checked for unconditional engines.

    Returns:
        List[Tuple[str, Any]]: (property, offending input) for every failed check
    """
    vectors = list(vectors)
    scalars = list(scalars)
    failures: List[Tuple[str, Any]] = []

    if engine(SparseVec()) != 0:
        failures.append(("zero", None))

    values = [engine(x) for x in vectors]

    for x, vx in zip(vectors, values):
        for c in scalars:
            if abs(engine(x * c) - abs(float(c)) * vx) > tol * max(1.0, vx):
                failures.append(("homogeneity", (x.to_json(), str(c))))

        if engine.unconditional:
            flipped = SparseVec(
                (i, -v if n % 2 else v) for n, (i, v) in enumerate(x.items_sorted())
            )

            if abs(engine(flipped) - vx) > tol * max(1.0, vx):
                failures.append(("sign-invariance", x.to_json()))

    for i, (x, vx) in enumerate(zip(vectors, values)):
        for y, vy in zip(vectors[i + 1 :], values[i + 1 :]):
            if engine(x + y) > vx + vy + tol * max(1.0, vx + vy):
                failures.append(("triangle", (x.to_json(), y.to_json())))

    return failures
