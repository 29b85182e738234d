from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Sequence

from plegmalab.core.finset import FinSubset, Universe
from plegmalab.core.plegma import PlegmaTuple, enumerate_plegma, plegma_from_flat
from plegmalab.util.errors import InvalidInput

Label = Hashable


@dataclass
class Coloring:
    """Coloring A finite partition of Plm_l([M]^k), stored as a total table

    Args:
        universe (Universe): Finite M
        k (int): Cardinality of the plegma members
        l (int): Length of the plegma tuples
        table (Dict[PlegmaTuple, Label]): Colour of every plegma l-tuple of [M]^k
    """

    universe: Universe
    k: int
    l: int  # noqa: E741
    table: Dict[PlegmaTuple, Label] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise InvalidInput("Colorings need positive k and l")

        missing = [
            t
            for t in enumerate_plegma(self.universe, self.k, self.l)
            if t not in self.table
        ]

        if missing:
            raise InvalidInput(
                f"Coloring is not total: {len(missing)} tuples uncoloured, "
                f"e.g. {missing[0].to_json()}"
            )

    @classmethod
    def from_function(
        cls,
        universe: Universe,
        k: int,
        l: int,  # noqa: E741
        fn: Callable[[PlegmaTuple], Label],
    ) -> "Coloring":
        return cls(
            universe=universe,
            k=k,
            l=l,
            table={t: fn(t) for t in enumerate_plegma(universe, k, l)},
        )

    @classmethod
    def from_mapping(
        cls,
        universe: Universe,
        k: int,
        l: int,  # noqa: E741
        mapping: Mapping[Sequence[Sequence[int]], Label],
    ) -> "Coloring":
        return cls(
            universe=universe,
            k=k,
            l=l,
            table={PlegmaTuple(t): c for t, c in mapping.items()},
        )

    @property
    def arity(self):
        return self.k, self.l

    @property
    def palette(self) -> List[Label]:
        return sorted(set(self.table.values()), key=repr)

    def __call__(self, t: Sequence[Sequence[int]]) -> Label:
        return self.table[t if isinstance(t, PlegmaTuple) else PlegmaTuple(t)]

    def of_flat(self, flat: Iterable[int]) -> Label:
        """Colour of the plegma tuple whose union is flat"""
        return self.table[plegma_from_flat(FinSubset(flat), self.k, self.l)]


def parity_of_sum(t: PlegmaTuple) -> int:
    return sum(e for s in t for e in s) % 2


def first_min_parity(t: PlegmaTuple) -> int:
    """Parity of s_1(1)"""
    return t[0][0] % 2


def constant(t: PlegmaTuple) -> int:
    return 0


COLORINGS: Dict[str, Callable[[PlegmaTuple], Label]] = {
    "parity-sum": parity_of_sum,
    "first-min-parity": first_min_parity,
    "constant": constant,
}


def named_coloring(name: str) -> Callable[[PlegmaTuple], Label]:
    if name not in COLORINGS:
        raise InvalidInput(f"Unknown coloring '{name}'. Available: {sorted(COLORINGS)}")

    return COLORINGS[name]
