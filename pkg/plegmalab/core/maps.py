import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, k_subsets
from plegmalab.core.plegma import (
    PlegmaTuple,
    enumerate_plegma,
    is_plegma,
    is_plegma_pair,
    plegma_from_flat,
)
from plegmalab.core.search import flats_ending_at, grow_subuniverse
from plegmalab.util.errors import InvalidInput

SetMap = Callable[[FinSubset], FinSubset]
MapTable = Dict[FinSubset, FinSubset]


def tabulate(
    fn: Callable[[FinSubset], Sequence[int]], universe: Universe, k: int
) -> MapTable:
    """tabulate Evaluate a map on every k-subset of a finite universe"""
    return {s: FinSubset(fn(s)) for s in k_subsets(universe, k)}


def named_map(name: str, **params) -> SetMap:
    """named_map Maps between finite subsets used in experiments and on the command line

    Args:
        name (str): One of
            * "initial": s -> s|j (param j)
            * "coords": s -> s(F) (param coords, 1-based)
            * "constant": s -> value (param value)
            * "pad": s -> s followed by s(k) + 1, ..., s(k) + extra (param extra, default 1)

    Raises:
        InvalidInput: Unknown name

    Returns:
        SetMap: The map
    """
    if name == "initial":
        j = int(params.get("j", 1))

        return lambda s: s.initial(j)

    if name == "coords":
        coords = [int(c) for c in params.get("coords", [1])]

        return lambda s: s.project(coords)

    if name == "constant":
        value = FinSubset(params.get("value", [1]))

        return lambda s: value

    if name == "pad":
        extra = int(params.get("extra", 1))

        return lambda s: FinSubset(list(s) + [s[-1] + e for e in range(1, extra + 1)])

    raise InvalidInput(f"Unknown map '{name}'. Use initial, coords, constant or pad")


@dataclass
class PreservingResult:
    preserving: bool
    checked: int
    counterexample: Optional[PlegmaTuple] = None
    images: Optional[List[List[int]]] = None

    def __bool__(self) -> bool:
        return self.preserving


def _lookup(table: Mapping[FinSubset, Sequence[int]], s: FinSubset) -> FinSubset:
    if s not in table:
        raise InvalidInput(f"Map table is not defined on {tuple(s)}")

    return FinSubset(table[s])


def is_plegma_preserving(
    table: Union[Mapping[FinSubset, Sequence[int]], SetMap],
    universe: Universe,
    k: int,
    max_l: int = 2,
) -> PreservingResult:
    """is_plegma_preserving Check that every plegma family is mapped to a plegma family

    All plegma l-tuples of [M]^k with 2 <= l <= max_l are checked. The table must be defined on
    every k-subset of M; a callable is tabulated first.

    Args:
        table (Union[Mapping, SetMap]): The map phi
        universe (Universe): Finite M
        k (int): Cardinality of the domain sets
        max_l (int): Longest plegma family to test

    Raises:
        InvalidInput: The table misses some k-subset of M

    Returns:
        PreservingResult: preserving flag and the first violating family (if any)
    """
    if callable(table):
        table = tabulate(table, universe, k)

    for s in k_subsets(universe, k):
        _lookup(table, s)

    checked = 0

    for l in range(2, max_l + 1):
        for family in enumerate_plegma(universe, k, l):
            checked += 1
            images = [_lookup(table, s) for s in family]

            if len({len(im) for im in images}) > 1 or not is_plegma(images):
                logger.debug(f"Map breaks plegma family {family.to_json()} -> {images}")

                return PreservingResult(
                    preserving=False,
                    checked=checked,
                    counterexample=family,
                    images=[list(im) for im in images],
                )

    return PreservingResult(preserving=True, checked=checked)


@dataclass
class WitnessResult:
    found: bool
    requested: Optional[int]
    subuniverse: List[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.subuniverse)


def _comparable(a: FinSubset, b: FinSubset) -> bool:
    return is_plegma_pair(a, b) or is_plegma_pair(b, a)


def find_nonpreserving_witness(
    table: Union[Mapping[FinSubset, Sequence[int]], SetMap],
    universe: Universe,
    k1: int,
    k2: int,
    target_size: Optional[int] = None,
) -> WitnessResult:
    """find_nonpreserving_witness Find L in M on which phi destroys every plegma pair

    For every plegma pair (s1, s2) in [L]^{k1} neither (phi(s1), phi(s2)) nor
    (phi(s2), phi(s1)) may be a plegma pair. This is guaranteed on some infinite L when k1 < k2;
    at a finite scale the search may come up short, which is reported through found.

    Args:
        table (Union[Mapping, SetMap]): phi: [M]^{k1} -> [N]^{k2}
        universe (Universe): Finite M
        k1 (int): Domain cardinality
        k2 (int): Codomain cardinality
        target_size (Optional[int]): Requested |L|. None searches for the largest L.

    Raises:
        InvalidInput: k1 >= k2

    Returns:
        WitnessResult: found flag and L
    """
    if not 1 <= k1 < k2:
        raise InvalidInput(f"Need 1 <= k1 < k2, got k1={k1}, k2={k2}")

    if callable(table):
        table = tabulate(table, universe, k1)

    def accept(chosen: List[int], m: int) -> bool:
        for flat in flats_ending_at(chosen, m, 2 * k1):
            s1, s2 = plegma_from_flat(flat, k1, 2)

            if _comparable(_lookup(table, s1), _lookup(table, s2)):
                return False

        return True

    found = grow_subuniverse(universe.elements(), accept, target_size=target_size)

    if found is None:
        logger.warning(f"No sub-universe of size {target_size} found at this scale")

        return WitnessResult(found=False, requested=target_size)

    # fewer than 2 k1 elements hold no plegma pair, so such an L witnesses nothing
    ok = len(found) >= (2 * k1 if target_size is None else target_size)

    return WitnessResult(found=ok, requested=target_size, subuniverse=list(found))


def verify_nonpreserving(
    table: Union[Mapping[FinSubset, Sequence[int]], SetMap],
    subuniverse: Sequence[int],
    k1: int,
) -> bool:
    """Check a witness directly on all plegma pairs of [L]^{k1}"""
    if callable(table):
        table = tabulate(table, Universe.explicit(subuniverse), k1)

    for flat in itertools.combinations(sorted(subuniverse), 2 * k1):
        s1, s2 = plegma_from_flat(flat, k1, 2)

        if _comparable(_lookup(table, s1), _lookup(table, s2)):
            return False

    return True
