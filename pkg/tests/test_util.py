from fractions import Fraction

import numpy as np
import pytest
from loguru import logger

from plegmalab.util.errors import (
    InvalidConfig,
    InvalidFunctional,
    InvalidInput,
    PlegmaLabError,
    ScaleRefusal,
)
from plegmalab.util.log import configure_logging, run_log, run_logfile
from plegmalab.util.system import (
    csv_dump,
    csv_load,
    json_dump,
    json_dumps,
    json_load,
    json_loads,
    safe_mkdirs,
    seed_everything,
    timethis,
)
from plegmalab.util.types import to_fraction


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.1, Fraction(1, 10)),
        ("2/6", Fraction(1, 3)),
        ("0.25", Fraction(1, 4)),
        ("0,9", Fraction(9, 10)),
        (" -1,5 ", Fraction(-3, 2)),
        (3, Fraction(3)),
        (Fraction(2, 7), Fraction(2, 7)),
    ],
)
def test_to_fraction(value, expected):
    assert to_fraction(value) == expected


def test_to_fraction_rejects_garbage():
    with pytest.raises(ValueError):
        to_fraction("1,2,3")


def test_error_hierarchy():
    assert issubclass(InvalidInput, ValueError)
    assert issubclass(InvalidConfig, ValueError)
    assert issubclass(InvalidFunctional, InvalidInput)
    assert issubclass(ScaleRefusal, RuntimeError)

    for cls in (InvalidInput, InvalidConfig, ScaleRefusal):
        assert issubclass(cls, PlegmaLabError)


def test_json_files(tmp_path):
    fname = str(tmp_path / "out.json")
    json_dump({"b": [1, 2], "a": "x"}, fname)
    assert json_load(fname) == {"a": "x", "b": [1, 2]}

    with open(fname) as fd:
        text = fd.read()

    assert text.index('"a"') < text.index('"b"')


def test_csv_files(tmp_path):
    fname = str(tmp_path / "out.csv")
    assert csv_dump(["n", "count"], [[1, 2], [3, 4]], fname) == 2
    assert csv_load(fname) == [["n", "count"], ["1", "2"], ["3", "4"]]


def test_safe_mkdirs(tmp_path):
    path = tmp_path / "a" / "b"
    safe_mkdirs(str(path))
    safe_mkdirs(str(path))
    assert path.is_dir()


def test_seed_everything():
    first = seed_everything(42).integers(0, 1000, size=5)
    again = seed_everything(42).integers(0, 1000, size=5)
    assert np.array_equal(first, again)


def test_timethis_keeps_result_and_name():
    @timethis()
    def add(a, b):
        return a + b

    assert add(2, b=3) == 5
    assert add.__name__ == "add"


def test_run_logfile_names(tmp_path):
    out = str(tmp_path)
    assert run_logfile(out, "sm.cesaro") is None
    assert run_logfile(out, "selftest").startswith(str(tmp_path / "selftest."))
    assert run_logfile(out, "sm.cesaro", prefix="logs/sm").startswith(
        str(tmp_path / "logs" / "sm.")
    )
    assert run_logfile("results", "sm.cesaro", prefix=str(tmp_path / "x")).startswith(
        str(tmp_path / "x.")
    )


def test_run_log_tags_records(tmp_path):
    configure_logging(level="WARNING")

    with run_log(str(tmp_path), "norm.eval", prefix="run") as logfile:
        logger.debug("inside the run")

    logger.debug("after the run")

    with open(logfile) as fd:
        text = fd.read()

    assert "| norm.eval |" in text
    assert "inside the run" in text
    assert "after the run" not in text

    with run_log(str(tmp_path), "norm.eval") as nothing:
        assert nothing is None


def test_json_literals():
    assert json_loads("[[[1, 3], 1], [[2, 4], 1]]") == [[[1, 3], 1], [[2, 4], 1]]
    text = json_dumps({"b": 1, "a": [1, 2]})
    assert text.index('"a"') < text.index('"b"')

    with pytest.raises(ValueError):
        json_loads("[[1, 1")
