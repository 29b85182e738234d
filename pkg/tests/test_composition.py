import math

import pytest

from plegmalab.core import Universe
from plegmalab.norms import LpNorm
from plegmalab.sequences import first_row_seq, pair_blocks
from plegmalab.spreading import composition_consistency

EVENS = Universe.parse("evens")


def test_composition_is_consistent():
    report = composition_consistency(
        first_row_seq(1), pair_blocks, LpNorm(2), EVENS, l=2, q=2, horizon=10
    )
    assert report.consistent
    assert report.max_discrepancy <= 1e-12
    assert report.C == 1
    assert report.K == pytest.approx(math.sqrt(2))
    assert len(report.rows) == 24
    assert report.to_json()["consistent"]


def test_composition_detects_the_wrong_space():
    report = composition_consistency(
        first_row_seq(1), pair_blocks, LpNorm(1), EVENS, l=2, q=2, horizon=10
    )
    assert not report.consistent
    assert report.max_discrepancy > report.tolerance


def test_composition_without_admissible_tuples():
    report = composition_consistency(
        first_row_seq(1), pair_blocks, LpNorm(2), EVENS, l=2, q=2, horizon=6
    )
    assert report.rows == []
    assert report.K == 0.0
    assert report.consistent
