import itertools
import math
from fractions import Fraction

import pytest

from plegmalab.core import Universe, k_subsets
from plegmalab.norms import (
    SchreierPlegmaticNorm,
    SparseVec,
    WFunctional,
    schreier_plegmatic_eval,
    seminorm_violations,
    w_functional_eval,
)
from plegmalab.norms.schreier import padding_used, schreier_feasible, verify_family
from plegmalab.util.errors import InvalidFunctional, InvalidInput, ScaleRefusal


def set_partitions(items):
    if not items:
        yield []

        return

    first, rest = items[0], items[1:]

    for part in set_partitions(rest):
        yield [[first]] + part

        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def brute_force_square(x):
    best = Fraction(0)

    for part in set_partitions(x.support()):
        if all(verify_family(block, max_pad=4) for block in part):
            squares = [sum(abs(x[s]) for s in block) ** 2 for block in part]
            best = max(best, sum(squares, Fraction(0)))

    return best


def test_blocked_pair_is_euclidean():
    value = schreier_plegmatic_eval(1, SparseVec({(1, 3): 1, (2, 4): 1}))
    assert value.square == 2
    assert value.value == math.sqrt(2)


def test_schreier_pair_is_l1():
    value = schreier_plegmatic_eval(1, SparseVec({(2, 4): 1, (3, 5): -1}))
    assert value.exact == 2
    assert value.value == 2.0


def test_plegma_tuple_below_first_element_is_l1():
    x = SparseVec({(3, 6, 9): 1, (4, 7, 10): "1/2", (5, 8, 11): -2})
    assert schreier_plegmatic_eval(2, x).exact == Fraction(7, 2)


@pytest.mark.parametrize(
    "entries",
    [
        {(1, 2): 1, (3, 4): 1, (5, 6): 1},
        {(2, 4): 2, (3, 5): -1, (1, 6): 1},
        {(1, 3): 1, (2, 4): "1/2", (3, 5): 1, (4, 6): -1},
        {(2, 7): 1, (3, 8): 1, (4, 5): "1/3", (1, 2): 1, (6, 8): 2},
    ],
)
def test_partition_search_matches_brute_force(entries):
    x = SparseVec(entries)
    assert schreier_plegmatic_eval(1, x).square == brute_force_square(x)


def test_random_supports_match_brute_force():
    points = list(k_subsets(Universe.horizon(7), 2))

    for support in itertools.islice(itertools.combinations(points, 4), 0, 400, 37):
        x = SparseVec((s, pos) for pos, s in enumerate(support, start=1))
        assert schreier_plegmatic_eval(1, x).square == brute_force_square(x), support


def test_certificate_attains_the_norm():
    x = SparseVec({(1, 3): 1, (2, 4): 2, (3, 5): -1, (4, 6): "1/2"})
    value = schreier_plegmatic_eval(1, x)
    f = value.certificate
    assert isinstance(f, WFunctional)
    assert w_functional_eval(f, x).square == value.square
    assert sum(lam ** 2 for lam in f.lambdas()) <= 1 + 1e-12
    assert all(verify_family(a.family, max_pad=4) for a in f.atoms)
    assert padding_used(f) >= 0


def test_greedy_mode_bounds():
    x = SparseVec({(1, 3): 1, (2, 4): 2, (3, 5): -1, (4, 6): "1/2", (5, 7): 1})
    exact = schreier_plegmatic_eval(1, x)
    greedy = schreier_plegmatic_eval(1, x, mode="greedy")
    assert not greedy.is_exact
    assert greedy.value <= exact.value + 1e-12
    assert greedy.upper_bound == float(x.l1())
    assert w_functional_eval(greedy.certificate, x).square == greedy.square


def test_exact_mode_refuses_large_support():
    x = SparseVec(
        (s, 1) for s in itertools.islice(k_subsets(Universe.horizon(8), 2), 13)
    )

    with pytest.raises(ScaleRefusal):
        schreier_plegmatic_eval(1, x)

    assert schreier_plegmatic_eval(1, x, mode="greedy").value > 0


def test_arity_and_mode_errors():
    with pytest.raises(InvalidInput):
        schreier_plegmatic_eval(2, SparseVec({(2, 4): 1}))

    with pytest.raises(InvalidInput):
        schreier_plegmatic_eval(1, SparseVec({(2, 4): 1}), mode="lp")

    with pytest.raises(InvalidInput):
        SchreierPlegmaticNorm(k=0)


def test_empty_vector():
    assert schreier_plegmatic_eval(1, SparseVec()).value == 0


def test_functional_value():
    x = SparseVec({(1, 3): 1, (2, 4): 1})
    f = WFunctional.from_parts([[(1, 3)], [(2, 4)]], [1, 1], scale_sq=2)
    assert w_functional_eval(f, x).square == 2

    negative = WFunctional.from_parts([[(1, 3)]], [1], signs=[[-1]])
    res = w_functional_eval(negative, x)
    assert res.value == -1
    assert res.square is None


def test_functional_json():
    f = WFunctional.from_parts([[(2, 4), (3, 5)]], [1], signs=[[1, -1]])
    again = WFunctional.from_json(f.to_json())
    x = SparseVec({(2, 4): 3, (3, 5): 1})
    assert w_functional_eval(again, x).value == 2


@pytest.mark.parametrize(
    "families,weights,scale_sq,signs",
    [
        ([[(1, 3)], [(1, 3)]], [1, 1], 2, None),
        ([[(1, 3), (2, 4)]], [1], 1, None),
        ([[(2, 4)], [(3, 5)]], [1, 1], 1, None),
        ([[(2, 4)]], [1], 0, None),
        ([[(2, 4)]], [1], 1, [[2]]),
    ],
)
def test_functional_invariants(families, weights, scale_sq, signs):
    with pytest.raises(InvalidFunctional):
        WFunctional.from_parts(families, weights, scale_sq=scale_sq, signs=signs)


def test_malformed_functional_json():
    with pytest.raises(InvalidFunctional):
        WFunctional.from_json({"atoms": [{"weight": 1}]})


def test_schreier_feasible_cache():
    assert schreier_feasible([(2, 4), (3, 5)])
    assert not schreier_feasible([(1, 3), (2, 4)])
    assert schreier_feasible([(1, 3)])


def test_engine_is_a_seminorm():
    engine = SchreierPlegmaticNorm(k=1)
    vectors = [
        SparseVec({(1, 3): 1, (2, 4): -1}),
        SparseVec({(2, 4): 2, (3, 5): 1}),
        SparseVec({(1, 2): "1/2", (4, 6): 1}),
    ]
    assert seminorm_violations(engine, vectors) == []
