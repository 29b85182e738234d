from fractions import Fraction

import pytest

from plegmalab.core import Universe
from plegmalab.norms import C0Norm, SparseVec
from plegmalab.sequences import (
    CanonicalTreeDecomposition,
    TreeMap,
    canonical_tree_extract,
    interval_restriction_identity,
    random_tree_map,
    tree_differences,
    verify_ctd,
)
from plegmalab.sequences.tree import choose_interval
from plegmalab.util.errors import InvalidInput


def staircase(n):
    """k = 1 decomposition with y_(m) = e_{10 m} above a root at 1"""
    y = {(): SparseVec({1: 1})}
    y.update({(m,): SparseVec({10 * m: 1}) for m in range(1, n + 1)})

    return CanonicalTreeDecomposition(
        Universe.horizon(n), 1, {tuple(t): v for t, v in y.items()}
    )


def test_tree_map_must_be_total():
    with pytest.raises(InvalidInput):
        TreeMap(Universe.horizon(2), 1, {(): SparseVec(), (1,): SparseVec()})

    with pytest.raises(InvalidInput):
        TreeMap(Universe.naturals(), 1, {})

    with pytest.raises(InvalidInput):
        TreeMap.from_function(lambda t: SparseVec({(1, 2): 1}), Universe.horizon(2), 1)


def test_tree_differences_telescope():
    phi = random_tree_map(Universe.horizon(4), k=2, seed=1)
    w = tree_differences(phi)
    assert w[()] == phi(())
    assert w[(1,)] + w[(1, 3)] + w[()] == phi((1, 3))


def test_random_tree_map_limits():
    with pytest.raises(InvalidInput):
        random_tree_map(Universe.explicit([3, 150]), k=1)

    with pytest.raises(InvalidInput):
        random_tree_map(Universe.horizon(3), k=1, block_len=6, tail_len=6)


def test_tree_map_json():
    phi = random_tree_map(Universe.horizon(3), k=2, seed=4)
    again = TreeMap.from_json(phi.to_json())
    assert again.nodes == phi.nodes
    assert again.universe.elements() == [1, 2, 3]

    with pytest.raises(InvalidInput):
        TreeMap.from_json({"k": 1})


def test_choose_interval():
    w = SparseVec({1: 1, 2: "1/100", 5: "1/1000"})
    window, err = choose_interval(w, C0Norm(), Fraction(1, 10))
    assert window == (1, 1)
    assert err == pytest.approx(0.01)

    window, err = choose_interval(w, C0Norm(), Fraction(1, 500))
    assert window == (1, 2)
    assert err == pytest.approx(0.001)

    assert choose_interval(w, C0Norm(), Fraction(1, 1000))[0] == (1, 5)

    assert choose_interval(SparseVec(), C0Norm(), Fraction(1)) == (None, 0.0)


def test_staircase_is_canonical():
    d = staircase(5)
    res = verify_ctd(d, x=d.x)
    assert res.ok
    assert res.checked["plegma"] > 0
    assert d.x((3,)) == SparseVec({1: 1, 30: 1})


def test_sum_violation_is_reported():
    d = staircase(4)
    res = verify_ctd(d, x=lambda s: SparseVec())
    assert not res
    assert res.violation["condition"] == "sum"


def test_plegma_violation_is_reported():
    d = staircase(4)
    d.y[(3,)] = SparseVec({5: 1})
    res = verify_ctd(d)
    assert not res.ok
    assert res.violation["condition"] == "plegma"


def test_overlapping_levels_are_rejected():
    d = staircase(3)
    d.y[(2,)] = SparseVec({20: 1, 30: 1})
    d.y[(3,)] = SparseVec({30: 1, 31: 1})
    res = verify_ctd(d)
    assert res.violation["condition"] == "plegma"
    assert res.violation["pair"] == [[2], [3]]


def test_interval_restriction_identity():
    d = staircase(5)
    assert interval_restriction_identity(d, [(1,), (2,), (4,)], 1)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_extraction_on_random_trees(seed):
    phi = random_tree_map(Universe.horizon(6), k=2, seed=seed)
    ext = canonical_tree_extract(phi, target_size=5)
    assert ext.complete
    assert len(ext.universe) == 5
    assert ext.within_tolerance
    assert verify_ctd(ext.decomposition).ok
    assert ext.decomposition.root() == phi(())


def test_extraction_of_largest_universe():
    phi = random_tree_map(Universe.horizon(5), k=1, seed=7)
    ext = canonical_tree_extract(phi)
    assert ext.complete
    assert ext.requested is None
    assert ext.universe.elements() == [1, 2, 3, 4, 5]
    assert ext.to_json()["size"] == 5


def test_extraction_falls_back_to_largest():
    phi = random_tree_map(Universe.horizon(4), k=1, seed=2)
    ext = canonical_tree_extract(phi, target_size=9)
    assert not ext.complete
    assert len(ext.universe) == 4


def test_decomposition_json():
    phi = random_tree_map(Universe.horizon(4), k=2, seed=5)
    d = canonical_tree_extract(phi).decomposition
    again = CanonicalTreeDecomposition.from_json(d.to_json())
    assert again.y == d.y
    assert verify_ctd(again).ok

    with pytest.raises(InvalidInput):
        CanonicalTreeDecomposition.from_json({"universe": [1], "k": 1})
