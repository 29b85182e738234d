import itertools
from dataclasses import dataclass, field
from typing import (
    Callable,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Union,
)

from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, k_subsets
from plegmalab.core.plegma import PlegmaTuple, is_plegma_pair, plegma_from_flat
from plegmalab.core.search import flats_ending_at, grow_subuniverse
from plegmalab.ramsey.coloring import Coloring, Label
from plegmalab.util.errors import InvalidInput


@dataclass
class MonochromaticResult:
    found: bool
    requested: int
    subuniverse: List[int] = field(default_factory=list)
    color: Optional[Label] = None
    verified: bool = False

    def __bool__(self) -> bool:
        return self.found


def verify_monochromatic(c: Coloring, subuniverse: Sequence[int]) -> Optional[Label]:
    """Colour of Plm_l([L]^k) if it is a single one, None otherwise (also None if empty)"""
    flats = itertools.combinations(sorted(subuniverse), c.k * c.l)
    colors = {c.of_flat(flat) for flat in flats}

    return colors.pop() if len(colors) == 1 else None


def monochromatize(
    c: Coloring, target_size: int, color: Optional[Label] = None
) -> MonochromaticResult:
    """monochromatize Find L in M of a given size with Plm_l([L]^k) monochromatic

    Plegma l-tuples of [L]^k are in bijection with the kl-subsets of L, so this is a
    hypergraph Ramsey search on flats. The reference colour is the colour of the first flat of
    L unless a colour is demanded.

    Args:
        c (Coloring): The partition
        target_size (int): |L|, at least kl
        color (Optional[Label]): Demand this colour

    Raises:
        InvalidInput: target_size < kl

    Returns:
        MonochromaticResult: found flag, L, its colour and the independent verification flag

    Examples:
        >>> c = Coloring.from_function(Universe.horizon(8), 1, 2, parity_of_sum)
        >>> monochromatize(c, 3).subuniverse
        [1, 3, 5]
    """
    kl = c.k * c.l

    if target_size < kl:
        raise InvalidInput(f"target_size must be at least kl={kl}")

    def accept(chosen: List[int], m: int) -> bool:
        if len(chosen) + 1 < kl:
            return True

        reference = color

        if reference is None:
            if len(chosen) + 1 == kl:
                return True

            reference = c.of_flat(chosen[:kl])

        return all(
            c.of_flat(flat) == reference for flat in flats_ending_at(chosen, m, kl)
        )

    found = grow_subuniverse(c.universe.elements(), accept, target_size=target_size)

    if found is None:
        logger.warning(
            f"No monochromatic sub-universe of size {target_size} at this scale"
        )

        return MonochromaticResult(found=False, requested=target_size)

    col = verify_monochromatic(c, found)
    logger.info(f"Monochromatic L={found} with colour {col}")

    return MonochromaticResult(
        found=True,
        requested=target_size,
        subuniverse=list(found),
        color=col,
        verified=col is not None and (color is None or col == color),
    )


@dataclass
class DichotomyResult:
    alternative: Optional[str]
    subuniverse: List[int] = field(default_factory=list)
    label: Optional[Label] = None
    verified: bool = False
    sizes: Mapping[str, int] = field(default_factory=dict)


def verify_constant(
    table: Mapping[FinSubset, Label], subuniverse: Sequence[int], k: int
) -> bool:
    return len({table[s] for s in k_subsets(Universe.explicit(subuniverse), k)}) <= 1


def verify_injective(
    table: Mapping[FinSubset, Label], subuniverse: Sequence[int], k: int
) -> bool:
    """Every plegma pair in [L]^k gets two different labels"""
    for s1, s2 in itertools.combinations(
        k_subsets(Universe.explicit(subuniverse), k), 2
    ):
        for a, b in ((s1, s2), (s2, s1)):
            if is_plegma_pair(a, b) and table[a] == table[b]:
                return False

    return True


def dichotomy_search(
    table: Union[Mapping[FinSubset, Label], Callable[[FinSubset], Hashable]],
    universe: Universe,
    k: int,
) -> DichotomyResult:
    """dichotomy_search Constant on [L]^k, or different labels on every plegma pair of [L]^k

    Both alternatives are searched for the largest L; the larger one wins, constant on ties.
    An L with fewer than 2k elements contains no plegma pair and certifies nothing, so it is
    reported as not found.

    Args:
        table (Union[Mapping, Callable]): phi on [M]^k
        universe (Universe): Finite M
        k (int): Cardinality of the domain sets

    Returns:
        DichotomyResult: alternative ("constant", "injective" or None), L, and verification
    """
    if callable(table):
        table = {s: table(s) for s in k_subsets(universe, k)}

    def accept_constant(chosen: List[int], m: int) -> bool:
        if len(chosen) + 1 <= k:
            return True

        reference = table[FinSubset(chosen[:k])]

        return all(
            table[FinSubset(s)] == reference for s in flats_ending_at(chosen, m, k)
        )

    def accept_injective(chosen: List[int], m: int) -> bool:
        for flat in flats_ending_at(chosen, m, 2 * k):
            s1, s2 = plegma_from_flat(flat, k, 2)

            if table[s1] == table[s2]:
                return False

        return True

    elems = universe.elements()
    const = grow_subuniverse(elems, accept_constant) or []
    inj = grow_subuniverse(elems, accept_injective) or []
    sizes = {"constant": len(const), "injective": len(inj)}
    logger.debug(f"Dichotomy candidate sizes {sizes}")

    if max(len(const), len(inj)) < 2 * k:
        logger.warning(
            "Neither alternative holds on a set with a plegma pair at this scale"
        )

        return DichotomyResult(alternative=None, sizes=sizes)

    if len(const) >= len(inj):
        return DichotomyResult(
            alternative="constant",
            subuniverse=const,
            label=table[FinSubset(const[:k])],
            verified=verify_constant(table, const, k),
            sizes=sizes,
        )

    return DichotomyResult(
        alternative="injective",
        subuniverse=inj,
        verified=verify_injective(table, inj, k),
        sizes=sizes,
    )


def find_plegma_in_subset(
    family: Iterable[Sequence[int]], l: int  # noqa: E741
) -> Optional[PlegmaTuple]:
    """find_plegma_in_subset Search a plegma l-tuple inside a finite family A of k-sets

    Candidates are sorted by first coordinate, and a member can only be followed by sets with a
    larger first coordinate. Each extension is checked against all chosen members, which is
    enough by the pairwise characterization of plegma families.

    Args:
        family (Iterable[Sequence[int]]): A
        l (int): Tuple length

    Returns:
        Optional[PlegmaTuple]: The lexicographically first plegma tuple in A, or None

    Examples:
        >>> find_plegma_in_subset([(1, 3), (2, 4), (1, 4)], 2)
        ((1, 3), (2, 4))
    """
    members = sorted({FinSubset(s) for s in family})

    if l < 1:
        raise InvalidInput("l must be positive")

    if len({len(s) for s in members}) > 1:
        raise InvalidInput("All members of A must have the same cardinality")

    def extend(chosen: List[FinSubset], start: int) -> Optional[List[FinSubset]]:
        if len(chosen) == l:
            return chosen

        for pos in range(start, len(members)):
            if len(chosen) + len(members) - pos < l:
                return None

            cand = members[pos]

            if all(is_plegma_pair(prev, cand) for prev in chosen):
                found = extend(chosen + [cand], pos + 1)

                if found is not None:
                    return found

        return None

    found = extend([], 0)

    return None if found is None else PlegmaTuple(found)
