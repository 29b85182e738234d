from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

from plegmalab.core.finset import FinSubset
from plegmalab.util.errors import InvalidInput
from plegmalab.util.types import Index, Number, to_fraction


def _index(key: Any) -> Index:
    if isinstance(key, (list, tuple)):
        return FinSubset(key)

    key = int(key)

    if key < 1:
        raise InvalidInput(f"Indices in N are positive, got {key}")

    return key


class SparseVec(dict):
    """SparseVec A finitely supported vector with exact rational entries

    Indices are positive integers (vectors in c00(N)) or FinSubsets of a fixed
    cardinality (vectors in c00([N]^{k+1})). Zero entries are never stored.

    Examples:
        >>> x = SparseVec({(2, 4): 1, (3, 5): -1})
        >>> x.support()
        [(2, 4), (3, 5)]
        >>> (x + x).l1()
        Fraction(4, 1)
    """

    def __init__(
        self, data: Union[Dict[Any, Number], Iterable[Tuple[Any, Number]]] = ()
    ):
        super().__init__()
        self.__iadd__(data)

    @classmethod
    def unit(cls, index: Any, value: Number = 1) -> "SparseVec":
        return cls([(index, value)])

    @classmethod
    def from_json(cls, entries: List[Dict[str, Any]]) -> "SparseVec":
        """Read [{"index": ..., "value": ...}, ...], values as numbers or strings like "1/3" """
        try:
            return cls((e["index"], e["value"]) for e in entries)
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"Malformed vector entry: {exc}")

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"index": list(i) if isinstance(i, tuple) else i, "value": str(v)}
            for i, v in self.items_sorted()
        ]

    def __getitem__(self, key: Any) -> Fraction:
        return self.get(_index(key), Fraction(0))

    def __iadd__(self, other: Union[Dict[Any, Number], Iterable[Tuple[Any, Number]]]):
        items = other.items() if isinstance(other, dict) else other

        for key, value in items:
            value = to_fraction(value)

            if value == 0:
                continue

            key = _index(key)
            total = self.get(key, Fraction(0)) + value

            if total == 0:
                del self[key]
            else:
                dict.__setitem__(self, key, total)

        self._check_arity()

        return self

    def _check_arity(self) -> None:
        if len({None if isinstance(i, int) else len(i) for i in self}) > 1:
            raise InvalidInput("A vector mixes indices of different arities")

    def __add__(self, other: "SparseVec") -> "SparseVec":
        res = SparseVec(self)
        res += other

        return res

    def __neg__(self) -> "SparseVec":
        return SparseVec((i, -v) for i, v in self.items())

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self + (-other)

    def __mul__(self, c: Number) -> "SparseVec":
        c = to_fraction(c)

        return SparseVec((i, c * v) for i, v in self.items())

    __rmul__ = __mul__

    @property
    def arity(self) -> Optional[int]:
        """None for vectors over N, the index cardinality otherwise (None when empty)"""
        for i in self:
            return None if isinstance(i, int) else len(i)

        return None

    def support(self) -> List[Index]:
        return sorted(self.keys())

    def items_sorted(self) -> List[Tuple[Index, Fraction]]:
        return [(i, dict.__getitem__(self, i)) for i in self.support()]

    def values_sorted(self) -> List[Fraction]:
        return [v for _, v in self.items_sorted()]

    def restrict(self, keep: Callable[[Index], bool]) -> "SparseVec":
        return SparseVec((i, v) for i, v in self.items() if keep(i))

    def map_indices(self, fn: Callable[[Index], Any]) -> "SparseVec":
        return SparseVec((fn(i), v) for i, v in self.items())

    def absolute(self) -> "SparseVec":
        return SparseVec((i, abs(v)) for i, v in self.items())

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.values()), Fraction(0))

    def linf(self) -> Fraction:
        return max((abs(v) for v in self.values()), default=Fraction(0))

    def dot(self, other: "SparseVec") -> Fraction:
        return sum(
            (v * other.get(i, Fraction(0)) for i, v in self.items()), Fraction(0)
        )

    def min_index(self) -> Optional[Index]:
        return min(self.keys(), default=None)

    def max_index(self) -> Optional[Index]:
        return max(self.keys(), default=None)


def block_ordered(x: SparseVec, y: SparseVec) -> bool:
    """x < y for vectors over N: max supp x < min supp y (vacuous for empty vectors)"""
    if not x or not y:
        return True

    return max(x) < min(y)
