import pytest

from plegmalab.core import (
    Universe,
    enumerate_plegma_paths,
    is_plegma_pair,
    is_skipped,
    plegma_distance,
    plegma_path_between,
    plegma_successors,
    shortest_plegma_path,
)
from plegmalab.util.errors import InvalidInput

PAIRS = [
    ((2,), (5,)),
    ((1, 3), (5, 7)),
    ((2, 5), (8, 11)),
    ((1, 3, 5), (7, 9, 11)),
]


def test_skipped_sets():
    assert is_skipped((2, 6), Universe.parse("evens"))
    assert not is_skipped((2, 4), Universe.parse("evens"))
    assert is_skipped((1, 3, 6), Universe.naturals())

    with pytest.raises(InvalidInput):
        is_skipped((3, 5), Universe.parse("evens"))


def test_constructed_path_example():
    assert plegma_path_between((1, 3), (5, 7), Universe.naturals()) == [
        (1, 3), (2, 6), (5, 7)
    ]


@pytest.mark.parametrize("s,t", PAIRS)
def test_constructed_path_has_length_k(s, t):
    path = plegma_path_between(s, t, Universe.naturals())
    assert len(path) == len(s) + 1
    assert path[0] == s and path[-1] == t
    assert all(is_plegma_pair(a, b) for a, b in zip(path, path[1:]))


@pytest.mark.parametrize("s,t", PAIRS)
def test_distance_is_exactly_k(s, t):
    universe = Universe.horizon(12)
    k = len(s)
    assert plegma_distance(s, t, universe) == k
    assert next(enumerate_plegma_paths(s, t, universe, k - 1), None) is None


def test_path_requires_skipped_sets_in_block_order():
    with pytest.raises(InvalidInput):
        plegma_path_between((1, 2), (5, 7), Universe.naturals())

    with pytest.raises(InvalidInput):
        plegma_path_between((5, 7), (1, 3), Universe.naturals())

    with pytest.raises(InvalidInput):
        plegma_path_between((1, 3), (5, 7, 9), Universe.naturals())


def test_shortest_path_is_a_plegma_path():
    path = shortest_plegma_path((1, 3), (5, 7), Universe.horizon(7))
    assert path is not None
    assert len(path) == 3
    assert all(is_plegma_pair(a, b) for a, b in zip(path, path[1:]))


def test_distance_to_self_and_unreachable():
    universe = Universe.horizon(6)
    assert plegma_distance((1, 3), (1, 3), universe) == 0
    # nothing in {1..6} can follow a set ending at 6 with a larger first element
    assert plegma_distance((5, 6), (1, 2), universe) is None


def test_successors_are_plegma_pairs():
    succ = list(plegma_successors((1, 3), Universe.horizon(5)))
    assert succ
    assert all(is_plegma_pair((1, 3), t) for t in succ)


def test_enumerated_paths_respect_max_len():
    paths = list(enumerate_plegma_paths((1, 3), (5, 7), Universe.horizon(8), 3))
    assert paths
    assert all(len(p) - 1 <= 3 for p in paths)
    assert min(len(p) - 1 for p in paths) == 2
