import itertools
from math import comb
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

from loguru import logger
from toolz import sliding_window

from plegmalab.core.finset import FinSubset, Universe
from plegmalab.util.errors import InvalidInput


def _as_family(family: Iterable[Sequence[int]]) -> List[FinSubset]:
    members = [s if isinstance(s, FinSubset) else FinSubset(s) for s in family]

    if any(len(s) == 0 for s in members):
        raise InvalidInput("Plegma families consist of nonempty sets")

    if len({len(s) for s in members}) > 1:
        raise InvalidInput(
            f"Plegma families need members of equal cardinality, got {[tuple(s) for s in members]}"
        )

    return members


def is_plegma_pair(s1: Sequence[int], s2: Sequence[int]) -> bool:
    """is_plegma_pair Check s1(1) < s2(1) < s1(2) < s2(2) < ... < s1(k) < s2(k)

    Args:
        s1 (Sequence[int]): First member
        s2 (Sequence[int]): Second member

    Returns:
        bool: True if (s1, s2) is a plegma pair
    """
    if len(s1) != len(s2) or len(s1) == 0:
        return False

    interleaved = [e for pair in zip(s1, s2) for e in pair]

    return all(a < b for a, b in sliding_window(2, interleaved))


def is_plegma(family: Iterable[Sequence[int]]) -> bool:
    """is_plegma Check whether (s_j)_{j=1}^l is a plegma family

    The two defining conditions are

        * s_1(i) < s_2(i) < ... < s_l(i) for every coordinate i
        * s_l(i) < s_1(i + 1) for every i < k

    Args:
        family (Iterable[Sequence[int]]): Members s_1, ..., s_l, all of the same cardinality k

    Raises:
        InvalidInput: Members have mixed cardinalities

    Returns:
        bool: True if the family is plegma

    Examples:
        >>> is_plegma([(1, 3), (2, 4)])
        True
        >>> is_plegma([(1, 4), (2, 3)])
        False
    """
    members = _as_family(family)

    if len(members) <= 1:
        return True

    k = len(members[0])

    for i in range(k):
        column = [s[i] for s in members]

        if any(a >= b for a, b in sliding_window(2, column)):
            return False

        if i + 1 < k and members[-1][i] >= members[0][i + 1]:
            return False

    return True


class PlegmaTuple(tuple):
    """PlegmaTuple A validated plegma family (s_j)_{j=1}^l of k-subsets

    Members are FinSubsets. Construction fails with InvalidInput if the family is not plegma.
    """

    def __new__(cls, members: Iterable[Sequence[int]]):
        members = _as_family(members)

        if len(members) == 0:
            raise InvalidInput("A plegma tuple has at least one member")

        if not is_plegma(members):
            raise InvalidInput(
                f"Not a plegma family: {[tuple(s) for s in members]}"
            )

        return super().__new__(cls, members)

    @property
    def k(self) -> int:
        return len(self[0])

    @property
    def l(self) -> int:  # noqa: E743
        return len(self)

    def member(self, j: int) -> FinSubset:
        """s_j, 1-based"""
        return self[j - 1]

    def to_json(self) -> List[List[int]]:
        return [list(s) for s in self]


def plegma_from_flat(flat: Sequence[int], k: int, l: int) -> PlegmaTuple:
    """plegma_from_flat The unique plegma l-tuple of k-sets whose union is flat

    The i-th coordinate block of the flat holds the i-th coordinates of the members, so
    s_j(i) = F((i - 1) l + j).

    Args:
        flat (Sequence[int]): F in [N]^{kl}
        k (int): Cardinality of members
        l (int): Number of members

    Raises:
        InvalidInput: |F| != kl

    Returns:
        PlegmaTuple: (s_j)_{j=1}^l

    Examples:
        >>> plegma_from_flat((2, 5, 7, 9), 2, 2)
        ((2, 7), (5, 9))
    """
    flat = FinSubset(flat)

    if k < 1 or l < 1 or len(flat) != k * l:
        raise InvalidInput(f"Flat of size {len(flat)} cannot hold {l} sets of size {k}")

    return PlegmaTuple(
        FinSubset(flat[i * l + j] for i in range(k)) for j in range(l)
    )


def flat_from_plegma(t: Sequence[Sequence[int]]) -> FinSubset:
    """flat_from_plegma Union of the members of a plegma tuple

    Inverse of plegma_from_flat.
    """
    t = t if isinstance(t, PlegmaTuple) else PlegmaTuple(t)

    return FinSubset(sorted(e for s in t for e in s))


def paper_formula_report(flat: Sequence[int], k: int, l: int) -> Dict[str, object]:
    """paper_formula_report Compare the printed index formula with the column-major one

    The printed reading s_j(i) = F((i - 1) k + j) only agrees with the bijection when k = l.
    This reports what it produces on the given flat.

    Returns:
        Dict[str, object]: printed members (or None when an index falls outside F), whether they
            are distinct / plegma / cover F, and the corrected tuple
    """
    flat = FinSubset(flat)
    corrected = plegma_from_flat(flat, k, l)
    printed: Optional[List[List[int]]] = []

    for j in range(1, l + 1):
        positions = [(i - 1) * k + j for i in range(1, k + 1)]

        if max(positions) > len(flat):
            printed = None

            break

        assert printed is not None
        printed.append([flat[p - 1] for p in positions])

    valid = False
    covers = False

    if printed is not None:
        covers = sorted(e for s in printed for e in s) == list(flat)
        try:
            valid = is_plegma(printed)
        except InvalidInput:
            valid = False

    report = {
        "flat": list(flat),
        "k": k,
        "l": l,
        "printed": printed,
        "printed_is_plegma": valid,
        "printed_covers_flat": covers,
        "corrected": corrected.to_json(),
        "consistent": printed == corrected.to_json(),
    }

    if not report["consistent"]:
        logger.warning(
            f"Printed index formula disagrees with the bijection on k={k}, l={l}: {report}"
        )

    return report


def enumerate_plegma(universe: Universe, k: int, l: int) -> Iterator[PlegmaTuple]:
    """enumerate_plegma All plegma l-tuples of k-subsets of a finite universe

    Streams in lexicographic order of flats, each tuple exactly once. The number of tuples is
    C(|M|, kl). Universes with fewer than kl elements give an empty stream.

    Args:
        universe (Universe): Finite M
        k (int): Cardinality of members
        l (int): Number of members

    Yields:
        PlegmaTuple: Members of Plm_l([M]^k)
    """
    if k < 1 or l < 1:
        raise InvalidInput("k and l must be positive")

    for flat in itertools.combinations(universe.elements(), k * l):
        yield plegma_from_flat(flat, k, l)


def count_plegma(n: int, k: int, l: int) -> int:
    """Number of plegma l-tuples in [M]^k for |M| = n"""
    return comb(n, k * l)


def restrict(
    t: Sequence[Sequence[int]],
    coords: Optional[Iterable[int]] = None,
    indices: Optional[Iterable[int]] = None,
) -> PlegmaTuple:
    """restrict Sub-tuple of selected members projected to selected coordinates

    Both selections are 1-based and default to everything. The result is always plegma.

    Args:
        t (Sequence[Sequence[int]]): A plegma tuple
        coords (Optional[Iterable[int]]): Coordinates F in {1, ..., k}
        indices (Optional[Iterable[int]]): Members in {1, ..., l}

    Raises:
        InvalidInput: Empty or out of range selection

    Returns:
        PlegmaTuple: (s_j(F))_{j in indices}
    """
    t = t if isinstance(t, PlegmaTuple) else PlegmaTuple(t)
    coords = sorted(set(range(1, t.k + 1) if coords is None else coords))
    indices = sorted(set(range(1, t.l + 1) if indices is None else indices))

    if not coords or not indices:
        raise InvalidInput("Selections must be nonempty")

    if coords[0] < 1 or coords[-1] > t.k or indices[0] < 1 or indices[-1] > t.l:
        raise InvalidInput(
            f"Selection out of range for k={t.k}, l={t.l}: coords={coords}, indices={indices}"
        )

    return PlegmaTuple(t.member(j).project(coords) for j in indices)
