import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from plegmalab.util.errors import InvalidInput, ScaleRefusal


class FinSubset(tuple):
    """FinSubset A finite subset of N, stored as its strictly increasing enumeration

    Positions are 1-based in the accessors, following the s(1) < s(2) < ... notation.
    Python tuple comparison is kept (lexicographic order). Block order between two
    sets (max s < min t) is exposed through precedes().

    Examples:
        >>> s = FinSubset([2, 5, 9])
        >>> s.at(2)
        5
        >>> s.initial(2)
        (2, 5)
    """

    def __new__(cls, elems: Iterable[int] = ()):
        elems = tuple(int(e) for e in elems)

        for e in elems:
            if e < 1:
                raise InvalidInput(
                    f"Elements of a subset of N must be positive: {elems}"
                )

        for a, b in zip(elems, elems[1:]):
            if a >= b:
                raise InvalidInput(f"Elements must be strictly increasing: {elems}")

        return super().__new__(cls, elems)

    @property
    def k(self) -> int:
        return len(self)

    def at(self, i: int) -> int:
        """s(i), 1-based"""
        if not 1 <= i <= len(self):
            raise InvalidInput(f"Position {i} out of range for {tuple(self)}")

        return self[i - 1]

    def initial(self, j: int) -> "FinSubset":
        """s|j, the first j elements (s|0 is the empty set)"""
        if not 0 <= j <= len(self):
            raise InvalidInput(f"Cannot take the first {j} elements of {tuple(self)}")

        return FinSubset(self[:j])

    def project(self, coords: Iterable[int]) -> "FinSubset":
        """s(F) = (s(i))_{i in F} for a set of 1-based coordinates F"""
        return FinSubset(self.at(i) for i in sorted(set(coords)))

    def precedes(self, other: Sequence[int]) -> bool:
        """Block order s < t, i.e. max s < min t. Empty sets precede everything."""
        if len(self) == 0 or len(other) == 0:
            return True

        return self[-1] < other[0]

    def shift(self, offset: int) -> "FinSubset":
        return FinSubset(e + offset for e in self)

    def to_json(self) -> List[int]:
        return list(self)


def blocks_ordered(a: Iterable[Any], b: Iterable[Any]) -> bool:
    """blocks_ordered Check max a < min b for two collections of comparable indices

    Vacuously true if either collection is empty.
    """
    a, b = list(a), list(b)

    if not a or not b:
        return True

    return max(a) < min(b)


@dataclass(frozen=True)
class Universe:
    """Universe An infinite M in [N]^infinity, or a finite piece of one

    kind is one of:

        * "explicit": a finite strictly increasing list of elements
        * "arithmetic": start, start + step, start + 2 step, ... (N is start=1, step=1),
          optionally capped by limit (inclusive)

    Indexing M(i) is 1-based.
    """

    kind: str = "arithmetic"
    elems: Tuple[int, ...] = ()
    start: int = 1
    step: int = 1
    limit: Optional[int] = None

    def __post_init__(self):
        if self.kind not in {"explicit", "arithmetic"}:
            raise InvalidInput(f"Unknown universe kind {self.kind}")

        if self.kind == "explicit":
            FinSubset(self.elems)

        if self.kind == "arithmetic" and (self.start < 1 or self.step < 1):
            raise InvalidInput("Arithmetic universes need start >= 1 and step >= 1")

    @classmethod
    def explicit(cls, elems: Iterable[int]) -> "Universe":
        return cls(kind="explicit", elems=tuple(FinSubset(sorted(set(elems)))))

    @classmethod
    def horizon(cls, n: int) -> "Universe":
        """The initial segment {1, ..., n}"""
        return cls(kind="arithmetic", start=1, step=1, limit=n)

    @classmethod
    def naturals(cls) -> "Universe":
        return cls(kind="arithmetic", start=1, step=1)

    @classmethod
    def arithmetic(
        cls, start: int, step: int, limit: Optional[int] = None
    ) -> "Universe":
        return cls(kind="arithmetic", start=start, step=step, limit=limit)

    @classmethod
    def parse(cls, description: Union[str, Sequence[int], "Universe"]) -> "Universe":
        """parse Build a universe from a config value

        Accepted: "naturals", "evens", "odds", "1..n", "a..b", "a,b,c" or a list of ints.

        Examples:
            >>> Universe.parse("1..5").elements()
            [1, 2, 3, 4, 5]
            >>> Universe.parse("evens").at(3)
            6
        """
        if isinstance(description, Universe):
            return description

        if not isinstance(description, str):
            return cls.explicit(int(e) for e in description)

        desc = description.strip().lower()

        if desc in {"n", "naturals", "nat"}:
            return cls.naturals()

        if desc == "evens":
            return cls.arithmetic(2, 2)

        if desc == "odds":
            return cls.arithmetic(1, 2)

        if ".." in desc:
            lo, hi = desc.split("..")

            if int(lo) == 1:
                return cls.horizon(int(hi))

            return cls.explicit(range(int(lo), int(hi) + 1))

        try:
            return cls.explicit(int(e) for e in desc.replace(" ", "").split(","))
        except ValueError:
            raise InvalidInput(f"Cannot parse universe description '{description}'")

    def __bool__(self) -> bool:
        return not self.is_finite or len(self) > 0

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit" or self.limit is not None

    def __len__(self) -> int:
        if not self.is_finite:
            raise ScaleRefusal("Infinite universe has no length. Truncate it first")

        if self.kind == "explicit":
            return len(self.elems)

        assert self.limit is not None

        if self.limit < self.start:
            return 0

        return (self.limit - self.start) // self.step + 1

    def __contains__(self, m: object) -> bool:
        if not isinstance(m, int):
            return False

        if self.kind == "explicit":
            return m in self.elems

        if self.limit is not None and m > self.limit:
            return False

        return m >= self.start and (m - self.start) % self.step == 0

    def at(self, i: int) -> int:
        """M(i), 1-based"""
        if i < 1 or (self.is_finite and i > len(self)):
            raise InvalidInput(f"Universe has no element at position {i}")

        if self.kind == "explicit":
            return self.elems[i - 1]

        return self.start + (i - 1) * self.step

    def index(self, m: int) -> int:
        """Position of m in M, 1-based"""
        if m not in self:
            raise InvalidInput(f"{m} is not an element of the universe")

        if self.kind == "explicit":
            return self.elems.index(m) + 1

        return (m - self.start) // self.step + 1

    def first(self, n: int) -> FinSubset:
        """M|n, the first n elements"""
        return FinSubset(self.at(i) for i in range(1, n + 1))

    def __iter__(self) -> Iterator[int]:
        if self.kind == "explicit":
            return iter(self.elems)

        if self.limit is None:
            return itertools.count(self.start, self.step)

        return iter(range(self.start, self.limit + 1, self.step))

    def elements(self) -> List[int]:
        if not self.is_finite:
            raise ScaleRefusal("Cannot list an infinite universe. Truncate it first")

        return list(self)

    def truncate(self, max_value: int) -> "Universe":
        """Elements of M that are <= max_value, as a finite universe"""
        if self.kind == "explicit":
            return Universe.explicit(e for e in self.elems if e <= max_value)

        limit = max_value if self.limit is None else min(self.limit, max_value)

        return Universe.arithmetic(self.start, self.step, limit)

    def subset(self, elems: Iterable[int]) -> "Universe":
        elems = sorted(set(elems))

        for e in elems:
            if e not in self:
                raise InvalidInput(f"{e} is not an element of the universe")

        return Universe.explicit(elems)

    def describe(self) -> str:
        if self.kind == "explicit":
            return ",".join(str(e) for e in self.elems)

        if (self.start, self.step) == (1, 1):
            return "naturals" if self.limit is None else f"1..{self.limit}"

        cap = "" if self.limit is None else f"<={self.limit}"

        return f"{self.start}+{self.step}n{cap}"


def k_subsets(universe: Universe, k: int) -> Iterator[FinSubset]:
    """All k-subsets of a finite universe in lexicographic order"""
    for comb in itertools.combinations(universe.elements(), k):
        yield FinSubset(comb)
