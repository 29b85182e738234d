import itertools
import math

import pytest

from plegmalab.cli.main import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_SCALE_REFUSAL,
    EXIT_SELFTEST_FAILED,
    main,
)
from plegmalab.util.system import csv_load, json_dumps, json_load


def run(tmp_path, *argv):
    return main(["--output-dir", str(tmp_path), *argv])


def test_plegma_enumerate(tmp_path):
    code = run(tmp_path, "plegma", "enumerate", "--n", "5", "--k", "2", "--l", "2")
    assert code == EXIT_OK
    rows = csv_load(str(tmp_path / "plegma.csv"))
    assert rows[0] == ["index", "flat", "tuple"]
    assert len(rows) == 6

    manifest = json_load(str(tmp_path / "manifest.json"))
    assert manifest["operation"] == "plegma.enumerate"
    assert manifest["artifacts"] == ["plegma.csv"]
    assert manifest["summary"] == {"count": 5}
    assert manifest["config"]["plegma"]["n"] == 5


def test_config_file_and_cli_override(tmp_path):
    config = tmp_path / "exp.yml"
    config.write_text("plegma:\n  n: 6\n  k: 2\n  l: 2\n")
    argv = ["--config", str(config), "--output-dir"]
    out = tmp_path / "from-file"
    assert main([*argv, str(out), "plegma", "enumerate"]) == EXIT_OK
    assert json_load(str(out / "manifest.json"))["summary"]["count"] == 15

    out = tmp_path / "overridden"
    assert main([*argv, str(out), "plegma", "enumerate", "--n", "5"]) == EXIT_OK
    assert json_load(str(out / "manifest.json"))["summary"]["count"] == 5


def test_norm_eval(tmp_path):
    vec = json_dumps([[[1, 3], 1], [[2, 4], 1]])
    argv = ["norm", "eval", "--engine", "schreier_plegmatic", "--k", "1", "--vec", vec]
    assert run(tmp_path, *argv) == EXIT_OK
    summary = json_load(str(tmp_path / "manifest.json"))["summary"]
    assert summary["value"] == pytest.approx(math.sqrt(2))
    assert summary["exact"]


def test_invalid_input_exit_code(tmp_path):
    haar = run(tmp_path, "norm", "eval", "--engine", "haar", "--vec", "[[1, 1]]")
    assert haar == EXIT_INVALID
    truncated = run(tmp_path, "norm", "eval", "--engine", "lp", "--vec", "[[1, 1")
    assert truncated == EXIT_INVALID
    assert run(tmp_path, "norm", "eval", "--engine", "lp") == EXIT_INVALID


def test_invalid_config_exit_code(tmp_path):
    config = tmp_path / "bad.yml"
    config.write_text("sm:\n  bogus: 1\n")
    argv = ["--config", str(config), "--output-dir", str(tmp_path), "sm", "l1"]
    assert main(argv) == EXIT_INVALID


def test_scale_refusal_exit_code(tmp_path):
    support = itertools.islice(itertools.combinations(range(1, 9), 2), 13)
    vec = json_dumps([[list(s), 1] for s in support])
    argv = ["norm", "eval", "--engine", "schreier_plegmatic", "--vec", vec]
    assert run(tmp_path, *argv) == EXIT_SCALE_REFUSAL


def test_tree_decomposition_round_trip(tmp_path):
    extract_dir = tmp_path / "extract"
    argv = [
        "--output-dir",
        str(extract_dir),
        "seq",
        "ctd-extract",
        "--tree-k",
        "1",
        "--tree-size",
        "5",
    ]
    assert main(argv) == EXIT_OK
    assert json_load(str(extract_dir / "manifest.json"))["summary"]["verified"]

    verify_dir = tmp_path / "verify"
    argv = [
        "--output-dir",
        str(verify_dir),
        "seq",
        "ctd-verify",
        "--input",
        str(extract_dir / "ctd.json"),
    ]
    assert main(argv) == EXIT_OK
    assert json_load(str(verify_dir / "verify.json"))["ok"]


def test_cesaro_with_svg(tmp_path):
    argv = [
        "--svg",
        "sm",
        "cesaro",
        "--gen",
        "xk_basis",
        "--k",
        "1",
        "--n-max",
        "3",
        "--functionals",
        "paper",
    ]
    assert run(tmp_path, *argv) == EXIT_OK
    manifest = json_load(str(tmp_path / "manifest.json"))
    assert manifest["summary"]["functional_matches_closed_form"]
    assert manifest["artifacts"] == ["cesaro.csv", "cesaro.json", "cesaro.svg"]
    assert len(csv_load(str(tmp_path / "cesaro.csv"))) == 4


def test_selftest_quick(tmp_path):
    assert run(tmp_path, "selftest", "--quick") == EXIT_OK
    rows = csv_load(str(tmp_path / "selftest.csv"))
    assert rows[0] == ["check", "passed", "detail"]
    assert all(r[1] == "True" for r in rows[1:])

    logs = list(tmp_path.glob("selftest.*.log"))
    assert len(logs) == 1
    assert logs[0].name in json_load(str(tmp_path / "manifest.json"))["artifacts"]
    assert "| selftest |" in logs[0].read_text()


def test_logfile_prefix_lives_in_the_run_directory(tmp_path):
    argv = ["--logfile-prefix", "logs/enum", "plegma", "enumerate", "--n", "5"]
    assert run(tmp_path, *argv) == EXIT_OK

    logs = list((tmp_path / "logs").glob("enum.*.log"))
    assert len(logs) == 1
    assert "| plegma.enumerate |" in logs[0].read_text()

    artifacts = json_load(str(tmp_path / "manifest.json"))["artifacts"]
    assert f"logs/{logs[0].name}" in artifacts


def test_runs_without_prefix_leave_no_logfile(tmp_path):
    assert run(tmp_path, "plegma", "enumerate", "--n", "5") == EXIT_OK
    assert list(tmp_path.rglob("*.log")) == []


def test_selftest_reports_a_corrupted_preset(tmp_path):
    preset = tmp_path / "corrupted.yml"
    preset.write_text("m_seq: [5, 10]\nn_seq: [2, 30]\n")
    code = run(tmp_path, "selftest", "--quick", "--preset", str(preset))
    assert code == EXIT_SELFTEST_FAILED
    rows = csv_load(str(tmp_path / "selftest.csv"))
    assert rows[1][:2] == ["preset", "False"]
