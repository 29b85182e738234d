import math
from fractions import Fraction

import pytest

from plegmalab.core import Universe
from plegmalab.norms import SparseVec
from plegmalab.sequences import make_generator, xk_basis
from plegmalab.spreading import (
    cesaro_limit,
    cesaro_mean,
    cesaro_scan,
    paper_functional,
    paper_functional_value,
)
from plegmalab.util.errors import InvalidInput


def test_cesaro_means():
    assert cesaro_mean(make_generator("l1_basis"), Universe.naturals(), 4) == SparseVec(
        (i, Fraction(1, 4)) for i in range(1, 5)
    )
    mean = cesaro_mean(xk_basis(1), Universe.parse("evens"), 3)
    assert mean == SparseVec({(2, 4): "1/3", (2, 6): "1/3", (4, 6): "1/3"})

    with pytest.raises(InvalidInput):
        cesaro_mean(xk_basis(1), Universe.naturals(), 1)


def test_functional_values():
    assert paper_functional_value(1, 1) == Fraction(1, 3)
    assert paper_functional_value(1, 2) == Fraction(4, 28)
    assert cesaro_limit(1) == Fraction(2, 9)
    assert cesaro_limit(2) == Fraction(3, 32)
    assert float(paper_functional_value(1, 200)) == pytest.approx(
        float(cesaro_limit(1)), rel=1e-2
    )


def test_functional_family():
    f = paper_functional(Universe.naturals(), 1, 2)
    assert len(f.atoms) == 1
    assert {tuple(s) for s in f.atoms[0].family} == {(3, 5), (3, 6), (4, 5), (4, 6)}


def test_scan_with_functionals():
    trace = cesaro_scan(
        xk_basis(1), Universe.naturals(), [1, 2, 6], functionals="paper"
    )
    assert trace.limit == Fraction(2, 9)
    assert [r.n for r in trace.rows] == [1, 2, 6]

    short, pair, large = trace.rows
    assert short.norm is None
    assert pair.norm == 1.0
    # 15 support points are beyond the exact Schreier search
    assert large.norm is None
    assert all(r.functional == r.analytic for r in trace.rows)
    assert large.functional == Fraction(36, 153)


def test_scan_outputs():
    trace = cesaro_scan(xk_basis(1), Universe.naturals(), [1, 2], functionals="paper")
    series = trace.series()
    assert series["n"] == [1, 2]
    assert math.isnan(series["norm"][0])
    assert series["functional"] == [pytest.approx(1 / 3), pytest.approx(1 / 7)]
    assert trace.to_json()["limit"] == "2/9"
    assert trace.table()[0][1] == ""


def test_scan_without_functionals():
    trace = cesaro_scan(make_generator("l1_basis"), Universe.naturals(), [1, 4])
    assert [r.norm for r in trace.rows] == [1.0, 1.0]
    assert trace.limit is None
    assert "functional" not in trace.series()


def test_scan_errors():
    with pytest.raises(InvalidInput):
        cesaro_scan(xk_basis(1), Universe.naturals(), [2], functionals="schur")

    with pytest.raises(InvalidInput):
        cesaro_scan(
            make_generator("l1_basis"), Universe.naturals(), [2], functionals="paper"
        )
