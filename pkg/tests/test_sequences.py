from fractions import Fraction

import pytest
from loguru import logger

from plegmalab.core import FinSubset, Universe, is_plegma
from plegmalab.norms import (
    C0Norm,
    ExampleNorm,
    LpNorm,
    SchreierPlegmaticNorm,
    SparseVec,
)
from plegmalab.sequences import (
    SUPPORTED_GENERATORS,
    basis_seq,
    c0_truncation_2seq,
    compose_seq,
    composition_tolerance,
    constant_seq,
    first_row_seq,
    is_plegma_block,
    is_plegma_disjointly_supported,
    l1_renorm,
    lift_seq,
    make_generator,
    pair_blocks,
    shifted_seq,
    summing_2seq,
    xk_basis,
)
from plegmalab.sequences.kseq import (
    additivity_violation,
    renorm_inner_tuples,
    summing_rows,
    unit_rows,
)
from plegmalab.util.errors import InvalidInput


def test_generators_check_arity():
    x = xk_basis(1)
    assert x.k == 2
    assert x((1, 3)) == SparseVec({(1, 3): 1})

    with pytest.raises(InvalidInput):
        x((1, 2, 3))


def test_basis_sequences():
    x = basis_seq(SchreierPlegmaticNorm(1))
    assert x.k == 2
    assert x((1, 2)) == SparseVec.unit((1, 2))
    assert x.norm(x((1, 2))) == 1
    assert x((2, 4)).support() == [(2, 4)]

    assert basis_seq(ExampleNorm(LpNorm(1), k=2))((1, 3, 5)).support() == [(1, 3, 5)]

    units = basis_seq(C0Norm(), name="c0_basis")
    assert units.k == 1
    assert units((7,)) == SparseVec({7: 1})


def test_summing_and_truncations():
    assert summing_2seq()((2, 5)).support() == [2, 3, 4, 5]
    assert c0_truncation_2seq(unit_rows)((2, 5)) == SparseVec({2: 1})
    assert c0_truncation_2seq(summing_rows)((2, 5)).support() == [2, 3, 4, 5]
    assert c0_truncation_2seq(unit_rows)((6, 5)) == SparseVec()


def test_first_row_is_euclidean():
    x = first_row_seq(1)
    assert x((3,)) == SparseVec({(1, 4): 1})

    combo = x.combination([1, 1], [(2,), (3,)])
    assert x.norm(combo) == pytest.approx(2 ** 0.5)


def test_bound_and_combination():
    x = summing_2seq()
    assert x.bound(Universe.horizon(5)) == 1
    assert x.combination(["1/2", "1/2"], [(1, 2), (2, 3)]) == SparseVec(
        {1: "1/2", 2: 1, 3: "1/2"}
    )


def test_lift():
    w = make_generator("l1_basis")
    x = lift_seq(w, 3)
    assert x.k == 3
    assert x((3, 7, 9)) == SparseVec({3: 1})
    assert x.describe()["lifted_from"] == 1

    with pytest.raises(InvalidInput):
        lift_seq(w, 1)


def test_compose_with_pair_blocks():
    z = compose_seq(first_row_seq(1), pair_blocks, 1)
    assert z.k == 2
    assert z((1, 4)) == SparseVec({(1, 5): 1, (1, 6): 1})
    assert z.describe()["d"] == 1

    with pytest.raises(InvalidInput):
        compose_seq(first_row_seq(1), pair_blocks, 0)


def test_compose_rejects_mismatched_blocks():
    def broken(t):
        return t, [Fraction(1), Fraction(1)]

    with pytest.raises(InvalidInput):
        compose_seq(make_generator("l1_basis"), broken, 1)


@pytest.mark.parametrize(
    "y_data",
    [
        lambda t: (FinSubset([1, 2]), [1, 1]),
        lambda t: (FinSubset([t[0], t[0] + 1, t[0] + 2]), [1, 1, 1]),
        lambda t: (FinSubset([10 - t[0]]), [1]),
    ],
)
def test_compose_rejects_overlapping_blocks(y_data):
    with pytest.raises(InvalidInput):
        compose_seq(make_generator("l1_basis"), y_data, 1)


def test_compose_checks_blocks_on_the_horizon():
    def late_overlap(t):
        return (FinSubset([2 * t[0]]), [1]) if t[0] <= 8 else (FinSubset([1]), [1])

    assert compose_seq(make_generator("l1_basis"), late_overlap, 1).k == 2

    with pytest.raises(InvalidInput):
        compose_seq(make_generator("l1_basis"), late_overlap, 1, check_horizon=9)


def test_composition_tolerance():
    assert composition_tolerance(1, 1, 0.1) == pytest.approx(0.3)
    assert composition_tolerance(0, 5, 0.2) == pytest.approx(0.2)


def test_renorm_inner_tuples_are_plegma():
    inner = renorm_inner_tuples((1, 3), 2, Universe.naturals())
    assert inner == ((2, 6), (3, 7))
    assert is_plegma(inner)
    assert is_plegma(renorm_inner_tuples((2, 4, 5), 3, Universe.parse("evens")))


def test_l1_renorm():
    y = l1_renorm(
        make_generator("l1_basis"),
        2,
        ["1/2", "1/2"],
        1,
        "1/10",
        Universe.naturals(),
        eps="1/4",
    )
    v = y((1,))
    assert v == SparseVec({2: Fraction(5, 12), 3: Fraction(5, 12)})
    assert float(v.l1()) == pytest.approx(5 / 6)
    assert y.describe()["ratio"] == "3/4"
    assert y.describe()["checked"] is True


def test_l1_renorm_without_eps_is_unchecked():
    messages = []
    sink = logger.add(messages.append, level="WARNING")

    try:
        y = l1_renorm(make_generator("l1_basis"), 1, [1], 1, 1, Universe.naturals())
    finally:
        logger.remove(sink)

    assert y.describe()["ratio"] == "0"
    assert y.describe()["checked"] is False
    assert y((2,)) == SparseVec({2: Fraction(1, 3)})
    assert any("unchecked" in m for m in messages)


@pytest.mark.parametrize(
    "p,b,c,eps_prime,eps",
    [
        (2, ["1/2"], 1, "1/10", None),
        (2, ["1/2", "1/4"], 1, "1/10", None),
        (1, [1], 0, "1/10", None),
        (1, [1], 1, 0, None),
        (2, ["1/2", "-1/2"], 1, "1/10", "1/10"),
    ],
)
def test_l1_renorm_parameter_checks(p, b, c, eps_prime, eps):
    with pytest.raises(InvalidInput):
        l1_renorm(
            make_generator("l1_basis"), p, b, c, eps_prime, Universe.naturals(), eps=eps
        )


def test_plegma_block_properties():
    horizon = Universe.horizon(6)
    assert not is_plegma_block(summing_2seq(), horizon)
    assert not is_plegma_disjointly_supported(summing_2seq(), horizon)

    units = make_generator("c0_units")
    assert is_plegma_block(units, horizon)
    assert is_plegma_disjointly_supported(units, horizon)
    assert is_plegma_block(make_generator("l2_basis"), horizon)


def test_additive_splitting():
    x = summing_2seq()
    v = SparseVec({1: 1})
    x1 = shifted_seq(x, v)
    x2 = constant_seq(v, 2, C0Norm())
    horizon = Universe.horizon(5)
    assert additivity_violation(x, x1, x2, horizon) is None
    zero = constant_seq(SparseVec(), 2, C0Norm())
    assert additivity_violation(x, x1, zero, horizon) == (1, 2)


@pytest.mark.parametrize("name", sorted(SUPPORTED_GENERATORS))
def test_registered_generators(name):
    params = {"k": 1} if name in ("xk_basis", "xk_first_row", "constant") else {}
    gen = make_generator(name, **params)
    s = tuple(range(2, 2 + gen.k))
    assert isinstance(gen(s), SparseVec)
    assert gen.describe()["generator"] == gen.name


def test_make_generator_errors():
    with pytest.raises(InvalidInput):
        make_generator("haar")

    with pytest.raises(InvalidInput):
        make_generator("summing", k=3)


def test_constant_generator_vector():
    gen = make_generator(
        "constant", k=2, vector=[{"index": 4, "value": "1/2"}], engine="lp"
    )
    assert gen.k == 2
    assert gen((1, 5)) == SparseVec({4: "1/2"})


def test_lp_ambient_norms():
    gen = make_generator("l2_basis")
    assert gen.norm(gen.combination([3, 4], [(1,), (2,)])) == 5
    assert isinstance(gen.ambient, LpNorm)
