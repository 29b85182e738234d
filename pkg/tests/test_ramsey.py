import itertools
import math
from fractions import Fraction

import pytest

from plegmalab.core import Universe, k_subsets, named_map
from plegmalab.ramsey import (
    Coloring,
    density_threshold_scan,
    dichotomy_search,
    find_plegma_in_subset,
    largest_plegma_free,
    monochromatize,
    named_coloring,
    plegma_graph,
    verify_injective,
    verify_monochromatic,
)
from plegmalab.ramsey.coloring import parity_of_sum
from plegmalab.util.errors import InvalidInput


def brute_force_largest_free(n, k, l):
    members = list(k_subsets(Universe.horizon(n), k))

    for size in range(len(members), -1, -1):
        for family in itertools.combinations(members, size):
            if find_plegma_in_subset(family, l) is None:
                return size

    return 0


def test_coloring_must_be_total():
    with pytest.raises(InvalidInput):
        Coloring.from_mapping(Universe.horizon(4), 1, 2, {((1,), (2,)): 0})


def test_coloring_lookup_by_flat():
    c = Coloring.from_function(Universe.horizon(5), 2, 2, parity_of_sum)
    assert c.of_flat((1, 2, 3, 4)) == 0
    assert c([(1, 3), (2, 5)]) == 1
    assert c.palette == [0, 1]


def test_unknown_coloring():
    with pytest.raises(InvalidInput):
        named_coloring("rainbow")


def test_monochromatize_parity_example():
    c = Coloring.from_function(Universe.horizon(8), 1, 2, parity_of_sum)
    res = monochromatize(c, 3)
    assert res.found
    assert res.subuniverse == [1, 3, 5]
    assert res.verified
    assert verify_monochromatic(c, res.subuniverse) == 0


@pytest.mark.parametrize("name", ["parity-sum", "first-min-parity", "constant"])
def test_monochromatize_k2(name):
    c = Coloring.from_function(Universe.horizon(10), 2, 2, named_coloring(name))
    res = monochromatize(c, 5)
    assert res.found
    assert len(res.subuniverse) == 5
    assert res.verified


def test_monochromatize_demanded_colour():
    c = Coloring.from_function(Universe.horizon(8), 1, 2, parity_of_sum)
    res = monochromatize(c, 3, color=1)
    assert not res.found or c.of_flat(res.subuniverse[:2]) == 1


def test_monochromatize_target_below_kl():
    c = Coloring.from_function(Universe.horizon(6), 2, 2, parity_of_sum)

    with pytest.raises(InvalidInput):
        monochromatize(c, 3)


def test_monochromatize_reports_failure_at_small_scale():
    c = Coloring.from_function(Universe.horizon(5), 1, 2, parity_of_sum)
    res = monochromatize(c, 5)
    assert not res.found
    assert res.subuniverse == []


def test_dichotomy_injective():
    res = dichotomy_search(named_map("initial", j=1), Universe.horizon(8), 2)
    assert res.alternative == "injective"
    assert res.subuniverse == list(range(1, 9))
    assert res.verified
    assert res.sizes["constant"] == 2


def test_dichotomy_constant():
    res = dichotomy_search(named_map("constant", value=[1, 2]), Universe.horizon(6), 2)
    assert res.alternative == "constant"
    assert res.label == (1, 2)
    assert res.verified


def test_verify_injective_detects_collision():
    table = {s: s[0] % 2 for s in k_subsets(Universe.horizon(6), 2)}
    assert not verify_injective(table, [1, 2, 3, 4, 5, 6], 2)


def test_find_plegma_in_subset():
    assert find_plegma_in_subset([(1, 3), (2, 4), (1, 4)], 2) == ((1, 3), (2, 4))
    assert find_plegma_in_subset([(1, 2), (3, 4)], 2) is None

    with pytest.raises(InvalidInput):
        find_plegma_in_subset([(1, 2), (3, 4, 5)], 2)


def test_plegma_graph_is_symmetric():
    graph = plegma_graph(5, 2)
    assert (2, 4) in graph[(1, 3)]
    assert (1, 3) in graph[(2, 4)]
    assert not graph[(1, 2)]


@pytest.mark.parametrize(
    "n,k,l", [(4, 2, 2), (5, 2, 2), (5, 2, 3), (6, 3, 2), (6, 2, 2)]
)
def test_largest_free_matches_brute_force(n, k, l):
    res = largest_plegma_free(n, k, l)
    assert res.exact
    assert res.size == brute_force_largest_free(n, k, l)
    assert len(res.witness) == res.size
    assert find_plegma_in_subset(res.witness, l) is None


def test_largest_free_known_values():
    assert largest_plegma_free(4, 2, 2).size == 5
    assert largest_plegma_free(5, 2, 2).size == 7
    assert largest_plegma_free(9, 1, 4).size == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_pair_free_families_are_non_crossing(n):
    # plegma pairs of 2-sets are crossing chords, so the maximum is 2n - 3
    assert largest_plegma_free(n, 2, 2).size == 2 * n - 3


def test_largest_free_is_monotone_in_l():
    sizes = [largest_plegma_free(6, 2, l).size for l in range(1, 4)]  # noqa: E741
    assert sizes == sorted(sizes)


def test_heuristic_above_exact_limit():
    res = largest_plegma_free(7, 2, 2, exact_limit=10)
    assert not res.exact
    assert find_plegma_in_subset(res.witness, 2) is None


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
@pytest.mark.parametrize(
    "delta", [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)]
)
def test_k1_threshold_is_ceil_l_over_delta(l, delta):  # noqa: E741
    expected = math.ceil(l / delta)
    scan = density_threshold_scan(1, l, delta, expected + 2)
    assert scan.threshold_n == expected
    assert scan.sufficient_n == expected


@pytest.mark.parametrize(
    "delta,criterion,expected",
    [
        ("0.9", "floor", 5),
        ("0.8", "floor", 5),
        ("0.9", "strict", 4),
        ("0.8", "strict", 5),
    ],
)
def test_k2_regressions(delta, criterion, expected):
    scan = density_threshold_scan(2, 2, delta, 7, criterion=criterion)
    assert scan.exact
    assert scan.threshold_n == expected


def test_scan_table_and_counterexample():
    scan = density_threshold_scan(2, 2, "1/2", 9)
    assert scan.threshold_n == 8
    rows = scan.table()
    assert rows[0][:3] == [2, 1, 1]
    assert rows[-1][0] == scan.threshold_n
    assert scan.counterexample is not None
    assert find_plegma_in_subset(scan.counterexample, 2) is None


def test_scan_rejects_bad_delta():
    with pytest.raises(InvalidInput):
        density_threshold_scan(1, 2, 0, 5)

    with pytest.raises(InvalidInput):
        density_threshold_scan(1, 2, "1/2", 5, criterion="ceil")


def test_scan_not_found():
    scan = density_threshold_scan(2, 3, "1/2", 5)
    assert not scan.found
    assert len(scan.rows) == 4
