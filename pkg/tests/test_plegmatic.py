import itertools

import pytest

from plegmalab.core import (
    Universe,
    find_nonpreserving_witness,
    first_coordinate_bound,
    greedy_blocks,
    is_plegma_preserving,
    is_plegmatic,
    is_schreier_plegmatic,
    is_weakly_plegmatic_path,
    k_subsets,
    named_map,
    verify_nonpreserving,
)
from plegmalab.core.plegmatic import check_witness, columns, exhaustive_blocks
from plegmalab.util.errors import InvalidInput

PAIRS = list(k_subsets(Universe.horizon(7), 2))


def test_schreier_examples():
    res = is_schreier_plegmatic([(2, 4), (3, 5)])
    assert res.feasible
    assert res.witness == ((2, 3), (4, 5))
    assert not is_schreier_plegmatic([(1, 3), (2, 4)])


def test_plegmatic_without_schreier_condition():
    res = is_plegmatic([(1, 3), (2, 4)])
    assert res.feasible
    assert check_witness([(1, 3), (2, 4)], res.witness)
    assert not check_witness([(1, 3), (2, 4)], res.witness, schreier=True)


def test_overlapping_columns_are_not_plegmatic():
    assert columns([(1, 4), (3, 5)]) == [[1, 3], [4, 5]]
    assert not is_plegmatic([(1, 4), (5, 6), (2, 3)])


def test_padding_is_reported():
    res = greedy_blocks([(5, 8), (6, 8)], schreier=True)
    assert res.feasible
    assert res.padding == (0, 1)
    assert check_witness([(5, 8), (6, 8)], res.witness, schreier=True)


@pytest.mark.parametrize("size", [1, 2])
def test_greedy_agrees_with_exhaustive(size):
    for family in itertools.combinations(PAIRS, size):
        for schreier in (False, True):
            greedy = greedy_blocks(family, schreier=schreier)
            exact = exhaustive_blocks(family, schreier=schreier)
            assert greedy.feasible == exact.feasible, family

            if exact.feasible:
                assert check_witness(family, exact.witness, schreier=schreier)


def test_incomplete_exhaustive_search():
    res = exhaustive_blocks([(1, 9), (2, 9), (3, 9)], max_pad=1)
    assert not res.complete


def test_weakly_plegmatic_paths():
    assert is_weakly_plegmatic_path([[(2, 5)], [(3, 6)]])
    assert not is_weakly_plegmatic_path([[(1, 2)], [(2, 3)]])

    path = [[(2, 5), (3, 7)], [(4, 8)], [(5, 9)]]
    assert is_weakly_plegmatic_path(path)
    assert first_coordinate_bound(path).max_first == 5

    with pytest.raises(InvalidInput):
        is_weakly_plegmatic_path([[(1, 2)], [(2, 3, 4)]])


def test_first_coordinate_bound_on_plegma_path():
    path = [[(1, 3, 5)], [(2, 4, 7)], [(3, 6, 8)], [(5, 7, 9)]]
    assert is_weakly_plegmatic_path(path)
    assert first_coordinate_bound(path).holds


def test_initial_segment_map_preserves_plegma():
    res = is_plegma_preserving(named_map("initial", j=1), Universe.horizon(7), 2)
    assert res.preserving
    assert res.checked > 0


def test_constant_map_breaks_plegma():
    res = is_plegma_preserving(
        named_map("constant", value=[1, 2]), Universe.horizon(5), 2
    )
    assert not res.preserving
    assert res.counterexample == ((1, 3), (2, 4))
    assert res.images == [[1, 2], [1, 2]]


def test_incomplete_table_is_rejected():
    with pytest.raises(InvalidInput):
        is_plegma_preserving({(1, 2): (1, 2)}, Universe.horizon(4), 2)


def test_unknown_map():
    with pytest.raises(InvalidInput):
        named_map("reverse")


def test_nonpreserving_witness_for_constant_map():
    fn = named_map("constant", value=[1, 2])
    res = find_nonpreserving_witness(fn, Universe.horizon(6), 1, 2)
    assert res.found
    assert res.subuniverse == [1, 2, 3, 4, 5, 6]
    assert verify_nonpreserving(fn, res.subuniverse, 1)


def test_nonpreserving_witness_for_padding_map():
    # (a, a + 1) and (b, b + 1) never form a plegma pair
    fn = named_map("pad", extra=1)
    res = find_nonpreserving_witness(fn, Universe.horizon(8), 1, 2, target_size=3)
    assert res.found
    assert len(res.subuniverse) == 3
    assert verify_nonpreserving(fn, res.subuniverse, 1)


def test_witness_requires_increasing_cardinality():
    with pytest.raises(InvalidInput):
        find_nonpreserving_witness(named_map("initial", j=1), Universe.horizon(6), 2, 1)
