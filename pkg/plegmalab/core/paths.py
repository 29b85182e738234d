import itertools
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence

from plegmalab.core.finset import FinSubset, Universe
from plegmalab.core.plegma import is_plegma_pair
from plegmalab.util.errors import InvalidInput


def is_skipped(s: Sequence[int], universe: Universe) -> bool:
    """is_skipped Some element of M lies strictly between any two consecutive elements of s

    Args:
        s (Sequence[int]): A subset of M
        universe (Universe): M

    Raises:
        InvalidInput: s is not a subset of M

    Returns:
        bool: True if s is skipped in M

    Examples:
        >>> is_skipped((2, 6), Universe.parse("evens"))
        True
        >>> is_skipped((2, 4), Universe.parse("evens"))
        False
    """
    s = FinSubset(s)

    for e in s:
        if e not in universe:
            raise InvalidInput(f"{e} is not an element of the universe")

    return all(universe.index(b) - universe.index(a) >= 2 for a, b in zip(s, s[1:]))


def _skip_filled(s: FinSubset, universe: Universe) -> List[int]:
    # s(1), m_1, s(2), m_2, ..., s(k) with m_i the first element of M after s(i)
    filled: List[int] = []

    for a, b in zip(s, s[1:]):
        filled.extend([a, universe.at(universe.index(a) + 1)])

    filled.append(s[-1])

    return filled


def plegma_path_between(
    s: Sequence[int], t: Sequence[int], universe: Universe
) -> List[FinSubset]:
    """plegma_path_between A plegma path of length k from s to t

    Both sets are extended to s~, t~ in [M]^{2k-1} by inserting, between consecutive elements,
    the next element of M. Then for 0 <= j <= k

        s_j = {s~(2i - 1 + j): 1 <= i <= k - j} U {t~(2i - 1 + k - j): 1 <= i <= j}

    so s_0 = s, s_k = t and every (s_j, s_{j+1}) is a plegma pair.

    Args:
        s (Sequence[int]): Skipped k-subset of M
        t (Sequence[int]): Skipped k-subset of M with s < t
        universe (Universe): M

    Raises:
        InvalidInput: s or t not skipped, s not < t, or different cardinalities

    Returns:
        List[FinSubset]: (s_0, ..., s_k)

    Examples:
        >>> plegma_path_between((1, 3), (5, 7), Universe.naturals())
        [(1, 3), (2, 6), (5, 7)]
    """
    s, t = FinSubset(s), FinSubset(t)
    k = len(s)

    if k == 0 or len(t) != k:
        raise InvalidInput(f"Need two nonempty sets of equal size, got {s} and {t}")

    if not s.precedes(t):
        raise InvalidInput(f"Need s < t (max s < min t), got {s} and {t}")

    for name, u in (("s", s), ("t", t)):
        if not is_skipped(u, universe):
            raise InvalidInput(f"{name}={tuple(u)} is not skipped in the universe")

    s_fill, t_fill = _skip_filled(s, universe), _skip_filled(t, universe)
    path = []

    for j in range(k + 1):
        low = [s_fill[2 * i - 2 + j] for i in range(1, k - j + 1)]
        high = [t_fill[2 * i - 2 + k - j] for i in range(1, j + 1)]
        path.append(FinSubset(low + high))

    for a, b in zip(path, path[1:]):
        assert is_plegma_pair(a, b), f"Path construction broke at {a}, {b}"

    return path


def plegma_successors(s: Sequence[int], universe: Universe) -> Iterator[FinSubset]:
    """plegma_successors All t in [M]^k such that (s, t) is a plegma pair

    t(i) ranges over the elements of M strictly between s(i) and s(i+1), and t(k) over the
    elements after s(k). The universe must be finite.
    """
    s = FinSubset(s)
    elems = universe.elements()
    bounds = list(s[1:]) + [None]
    choices = [
        [m for m in elems if m > a and (b is None or m < b)] for a, b in zip(s, bounds)
    ]

    for t in itertools.product(*choices):
        yield FinSubset(t)


def shortest_plegma_path(
    s: Sequence[int], t: Sequence[int], universe: Universe
) -> Optional[List[FinSubset]]:
    """shortest_plegma_path BFS in the directed plegma graph on [M]^k

    Returns:
        Optional[List[FinSubset]]: A shortest path from s to t, None if unreachable
    """
    s, t = FinSubset(s), FinSubset(t)

    if len(s) != len(t):
        raise InvalidInput("Vertices of the plegma graph have equal cardinality")

    parents: Dict[FinSubset, Optional[FinSubset]] = {s: None}
    queue = deque([s])

    while queue:
        node = queue.popleft()

        if node == t:
            path = [node]

            while parents[path[-1]] is not None:
                path.append(parents[path[-1]])  # type: ignore

            return list(reversed(path))

        for nxt in plegma_successors(node, universe):
            if nxt not in parents:
                parents[nxt] = node
                queue.append(nxt)

    return None


def plegma_distance(
    s: Sequence[int], t: Sequence[int], universe: Universe
) -> Optional[int]:
    """plegma_distance Directed distance from s to t in the plegma graph

    Args:
        s (Sequence[int]): Source in [M]^k
        t (Sequence[int]): Target in [M]^k
        universe (Universe): Finite M

    Returns:
        Optional[int]: Number of edges, 0 if s = t, None if t is unreachable

    Examples:
        >>> plegma_distance((1, 3), (5, 7), Universe.horizon(7))
        2
    """
    path = shortest_plegma_path(s, t, universe)

    return None if path is None else len(path) - 1


def enumerate_plegma_paths(
    s: Sequence[int], t: Sequence[int], universe: Universe, max_len: int
) -> Iterator[List[FinSubset]]:
    """enumerate_plegma_paths All plegma paths from s to t with at most max_len edges"""
    s, t = FinSubset(s), FinSubset(t)

    def extend(path: List[FinSubset]) -> Iterator[List[FinSubset]]:
        if path[-1] == t and len(path) > 1:
            yield list(path)

        if len(path) - 1 >= max_len:
            return

        for nxt in plegma_successors(path[-1], universe):
            path.append(nxt)
            yield from extend(path)
            path.pop()

    if s == t:
        yield [s]

    yield from extend([s])
