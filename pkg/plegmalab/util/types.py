import re
from fractions import Fraction
from typing import Dict, Tuple, TypeVar, Union

T = TypeVar("T")
K = TypeVar("K")
V = TypeVar("V")

# Inputs accepted wherever an exact scalar is expected
Number = Union[int, float, Fraction, str]

# Vectors are indexed either by n in N or by (k+1)-subsets of N
Index = Union[int, Tuple[int, ...]]

GenericDict = Dict[K, V]

DECIMAL_COMMA = re.compile(r"-?\d+,\d+")


def to_fraction(value: Number) -> Fraction:
    """to_fraction Convert user input into an exact rational

    Floats go through their shortest repr, so 0.1 becomes 1/10 and not the binary
    approximation.

    Args:
        value (Number): int, float, Fraction or a string like "1/3" or "0.25". A decimal
            comma is accepted, "0,9" is 9/10

    Returns:
        Fraction: The exact value

    Examples:
        >>> to_fraction(0.1)
        Fraction(1, 10)
        >>> to_fraction("2/6")
        Fraction(1, 3)
    """
    if isinstance(value, str) and DECIMAL_COMMA.fullmatch(value.strip()):
        value = value.strip().replace(",", ".")

    if isinstance(value, Fraction):
        return value

    if isinstance(value, float):
        return Fraction(repr(value))

    return Fraction(value)
