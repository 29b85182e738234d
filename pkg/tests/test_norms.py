import math
from fractions import Fraction

import pytest
from omegaconf import OmegaConf

from plegmalab.norms import (
    C0Norm,
    ExampleNorm,
    LpNorm,
    NormEngine,
    NormValue,
    SparseVec,
    SummingNorm,
    TsirelsonNorm,
    example_norm_eval,
    lp_eval,
    make_engine,
    seminorm_violations,
    sqrt_fraction,
)
from plegmalab.norms.base import exact_sqrt
from plegmalab.norms.classical import parse_p
from plegmalab.norms.sparse import block_ordered
from plegmalab.util.errors import InvalidConfig, InvalidInput, ScaleRefusal


class SquaredL2(NormEngine):
    name = "squared"

    def evaluate(self, x):
        return NormValue.rational(sum((v * v for v in x.values()), Fraction(0)))


def test_sparse_vectors_drop_zeros():
    x = SparseVec({1: 1, 2: 0, 3: "1/2"})
    assert x.support() == [1, 3]
    assert x[3] == Fraction(1, 2)
    assert x[7] == 0
    assert not (x - x)


def test_sparse_vector_rejections():
    with pytest.raises(InvalidInput):
        SparseVec({0: 1})

    with pytest.raises(InvalidInput):
        SparseVec({1: 1, (2, 3): 1})

    with pytest.raises(InvalidInput):
        SparseVec.from_json([{"index": 1}])


def test_sparse_vector_json():
    x = SparseVec.from_json(
        [{"index": [2, 4], "value": "1/3"}, {"index": [3, 5], "value": -1}]
    )
    assert x.arity == 2
    assert x.to_json() == [
        {"index": [2, 4], "value": "1/3"}, {"index": [3, 5], "value": "-1"}
    ]


def test_block_order():
    assert block_ordered(SparseVec({1: 1, 2: 1}), SparseVec({3: 1}))
    assert not block_ordered(SparseVec({1: 1, 4: 1}), SparseVec({3: 1}))
    assert block_ordered(SparseVec(), SparseVec({3: 1}))


def test_exact_square_roots():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None
    assert sqrt_fraction(Fraction(2)) == sqrt_fraction(Fraction(4, 2))

    with pytest.raises(InvalidInput):
        exact_sqrt(Fraction(-1))


@pytest.mark.parametrize("p", ["inf", "infinity", math.inf, 1, 2.5, "3"])
def test_parse_p(p):
    assert parse_p(p) >= 1


@pytest.mark.parametrize("p", [0.5, "zero", None])
def test_parse_p_rejects(p):
    with pytest.raises(InvalidInput):
        parse_p(p)


def test_lp_values():
    x = SparseVec({1: 3, 5: -4})
    assert lp_eval(1, x).exact == 7
    assert lp_eval("inf", x).exact == 4
    assert lp_eval(2, x).exact == 5
    assert lp_eval(2, SparseVec({1: 1, 2: 1})).square == 2
    assert lp_eval(3, x).value == pytest.approx((27 + 64) ** (1 / 3))
    assert not lp_eval(3, x).is_exact
    assert lp_eval(3, SparseVec()).value == 0


def test_summing_norm():
    norm = SummingNorm()
    assert norm(SparseVec({1: 1, 2: -1, 3: 1})) == 1
    assert norm(SparseVec({1: 1, 2: 1, 3: 1})) == 3
    assert not norm.unconditional


def test_c0_is_sup():
    assert C0Norm()(SparseVec({4: -2, 9: 1})) == 2
    assert C0Norm().params == {}


@pytest.mark.parametrize(
    "engine", [LpNorm(1), LpNorm(2), LpNorm(3), C0Norm(), SummingNorm()]
)
def test_classical_norms_are_seminorms(engine):
    vectors = [
        SparseVec({1: 1, 2: -2}),
        SparseVec({2: "1/2", 5: 3}),
        SparseVec({3: -1}),
        SparseVec({1: 2, 4: 1, 6: -1}),
    ]
    assert seminorm_violations(engine, vectors) == []


def test_seminorm_violations_are_reported():
    failures = seminorm_violations(SquaredL2(), [SparseVec({1: 1}), SparseVec({1: 2})])
    kinds = {kind for kind, _ in failures}
    assert "homogeneity" in kinds
    assert "triangle" in kinds


def test_example_norm_on_plegma_pair():
    x = SparseVec({(2, 4): 1, (3, 5): 1})
    value = example_norm_eval(LpNorm(2), 1, x)
    assert value.square == 2
    assert value.certificate["tuple"] == [[2, 4], [3, 5]]
    assert example_norm_eval(LpNorm(1), 1, x).value == 2


def test_example_norm_respects_first_element_bound():
    # a plegma pair starting at 1 only admits tuples of length 1
    x = SparseVec({(1, 3): 1, (2, 4): 1})
    assert example_norm_eval(LpNorm(1), 1, x).value == 1


def test_example_norm_non_plegma_support():
    x = SparseVec({(2, 3): 1, (4, 5): 1})
    assert example_norm_eval(LpNorm(1), 1, x).value == 1


def test_example_norm_horizon_pool():
    x = SparseVec({(2, 4): 1, (3, 5): -1})
    assert example_norm_eval(LpNorm(1), 1, x, horizon=6).value == 2


def test_example_norm_refuses_conditional_base():
    x = SparseVec({(2, 4): 1, (3, 5): 1})

    with pytest.raises(ScaleRefusal):
        example_norm_eval(SummingNorm(), 1, x)

    lower = example_norm_eval(SummingNorm(), 1, x, mode="sampled", samples=200, seed=3)
    assert not lower.is_exact
    assert lower.value <= 2


def test_example_norm_arity_mismatch():
    with pytest.raises(InvalidInput):
        example_norm_eval(LpNorm(1), 2, SparseVec({(2, 4): 1}))

    with pytest.raises(InvalidInput):
        ExampleNorm(LpNorm(1), k=0)


def test_example_engine_is_a_seminorm():
    engine = ExampleNorm(LpNorm(2), k=1)
    vectors = [
        SparseVec({(2, 4): 1, (3, 5): -1}),
        SparseVec({(2, 5): 2, (3, 6): 1, (4, 7): 1}),
        SparseVec({(1, 2): 1}),
    ]
    assert seminorm_violations(engine, vectors) == []


def test_make_engine():
    assert isinstance(make_engine("lp"), LpNorm)
    assert make_engine({"engine": "lp", "p": "inf"}).params == {"p": "inf"}

    config = {"engine": "example", "k": 1, "base": {"engine": "lp", "p": 2}}
    example = make_engine(OmegaConf.create(config))
    assert isinstance(example, ExampleNorm)
    assert example.base.p == 2

    custom = make_engine(
        {"engine": "tsirelson_like", "m_seq": [20, 400], "n_seq": [4, 100]}
    )
    assert isinstance(custom, TsirelsonNorm)
    assert custom.config.m_seq == (20, 400)
    assert make_engine("tsirelson_like").config.name == "desk"


def test_make_engine_errors():
    with pytest.raises(InvalidConfig):
        make_engine("hilbert")

    with pytest.raises(InvalidConfig):
        make_engine({"engine": "lp", "q": 3})

    with pytest.raises(InvalidConfig):
        make_engine({"engine": "tsirelson_like", "m_seq": [5, 10], "n_seq": [2, 3]})


def test_norm_value_json():
    value = NormValue.from_square(Fraction(2), certificate={"tuple": []})
    out = value.to_json()
    assert out["square"] == "2"
    assert "exact" not in out
    assert out["certificate"] == {"tuple": []}
