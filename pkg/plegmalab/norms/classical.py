import math
from fractions import Fraction
from typing import Any, Dict, Union

from plegmalab.norms.base import NormEngine, NormValue
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidInput

PValue = Union[int, float, str]


def parse_p(p: PValue) -> float:
    """1 <= p <= inf; accepts "inf", "infinity" and math.inf"""
    if isinstance(p, str) and p.strip().lower() in {"inf", "infinity", "oo"}:
        return math.inf

    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InvalidInput(f"Invalid exponent p={p}")

    if not value >= 1:
        raise InvalidInput(f"Need 1 <= p <= inf, got p={p}")

    return value


def lp_eval(p: PValue, x: SparseVec) -> NormValue:
    """lp_eval l^p norm (sup norm for p = inf) of a finitely supported vector

    p = 1 and p = inf are exact. p = 2 keeps the exact square.

    Examples:
        >>> lp_eval(1, SparseVec({1: 1, 2: -1})).value
        2.0
        >>> lp_eval("inf", SparseVec({5: 3})).exact
        Fraction(3, 1)
    """
    p = parse_p(p)

    if p == 1:
        return NormValue.rational(x.l1())

    if math.isinf(p):
        return NormValue.rational(x.linf())

    if p == 2:
        return NormValue.from_square(sum((v * v for v in x.values()), Fraction(0)))

    if not x:
        return NormValue.rational(Fraction(0))

    # scale by the sup norm to keep the powers in range
    top = float(x.linf())
    total = sum((abs(float(v)) / top) ** p for v in x.values())

    return NormValue(value=top * total ** (1 / p), is_exact=False)


class LpNorm(NormEngine):
    name = "lp"

    def __init__(self, p: PValue = 2):
        self.p = parse_p(p)

    @property
    def params(self) -> Dict[str, Any]:
        return {"p": "inf" if math.isinf(self.p) else self.p}

    def evaluate(self, x: SparseVec) -> NormValue:
        return lp_eval(self.p, x)


class C0Norm(LpNorm):
    name = "c0"

    def __init__(self):
        super(C0Norm, self).__init__("inf")

    @property
    def params(self) -> Dict[str, Any]:
        return {}


class SummingNorm(NormEngine):
    """SummingNorm sup_k |a_1 + ... + a_k| over the support in increasing order

    The norm of the summing basis. It is spreading but not unconditional.
    """

    name = "summing"
    unconditional = False

    def evaluate(self, x: SparseVec) -> NormValue:
        best = Fraction(0)
        partial = Fraction(0)

        for v in x.values_sorted():
            partial += v
            best = max(best, abs(partial))

        return NormValue.rational(best)
