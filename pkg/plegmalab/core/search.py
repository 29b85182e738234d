import itertools
from typing import Callable, Iterator, List, Optional, Sequence

from loguru import logger

# accept(chosen, m) decides whether m may be appended to the increasing list chosen.
# It only needs to check the constraints that involve m as the largest element.
Acceptor = Callable[[List[int], int], bool]


def flats_ending_at(chosen: Sequence[int], m: int, size: int) -> Iterator[tuple]:
    """All size-subsets of chosen + [m] that contain m (as their maximum)"""
    if size < 1:
        return

    for head in itertools.combinations(chosen, size - 1):
        yield head + (m,)


def grow_subuniverse(
    elems: Sequence[int],
    accept: Acceptor,
    target_size: Optional[int] = None,
    node_limit: Optional[int] = None,
) -> Optional[List[int]]:
    """grow_subuniverse Depth-first search for a sub-universe L of elems

    Elements are added in increasing order and every extension is filtered by accept, so any
    hereditary property checkable on the newly created subsets can be searched for.

    With a target_size the lexicographically first L of that size is returned (None if none
    exists). Without a target the largest L is returned (ties broken lexicographically).

    Args:
        elems (Sequence[int]): Increasing candidate elements
        accept (Acceptor): Extension test
        target_size (Optional[int]): Requested |L|
        node_limit (Optional[int]): Stop after this many visited nodes (returns best so far)

    Returns:
        Optional[List[int]]: The sub-universe found
    """
    elems = list(elems)
    best: List[int] = []
    visited = 0
    stop = False

    def dfs(chosen: List[int], start: int) -> Optional[List[int]]:
        nonlocal best, visited, stop
        visited += 1

        if node_limit is not None and visited > node_limit:
            stop = True

            return None

        if target_size is not None and len(chosen) == target_size:
            return list(chosen)

        if len(chosen) > len(best):
            best = list(chosen)

        remaining = len(elems) - start
        goal = target_size if target_size is not None else len(best) + 1

        if len(chosen) + remaining < goal:
            return None

        for pos in range(start, len(elems)):
            if stop:
                return None

            if len(chosen) + len(elems) - pos < goal:
                break

            m = elems[pos]

            if not accept(chosen, m):
                continue

            chosen.append(m)
            found = dfs(chosen, pos + 1)
            chosen.pop()

            if found is not None:
                return found

            if target_size is None:
                goal = len(best) + 1

        return None

    found = dfs([], 0)

    if stop:
        logger.warning(f"Sub-universe search stopped after {node_limit} nodes")

    if target_size is not None:
        return found

    return best
