import argparse
import io
import os

import pytest
from omegaconf import OmegaConf

from plegmalab.config.config_parser import parse_config
from plegmalab.config.omegaconf import OmegaConfExtended
from plegmalab.config.presets import TsirelsonPreset, load_tsirelson
from plegmalab.config.schema import validate_config
from plegmalab.util.errors import InvalidConfig


def make_parser():
    parser = argparse.ArgumentParser("plegma-lab")
    parser.add_argument("--horizon", dest="sm.horizon", type=int, default=7)
    parser.add_argument("--gen", dest="sm.gen")
    parser.add_argument("--svg", dest="svg", action="store_true")

    return parser


def test_cli_defaults_override_schema_defaults():
    cfg = parse_config(make_parser(), None, args=[])
    assert cfg.sm.horizon == 7
    assert cfg.sm.q == 4
    assert cfg.sm.gen == "xk_basis"
    assert cfg.output_dir == "results"


def test_config_file_overrides_cli_defaults():
    config_file = io.StringIO("sm:\n  horizon: 12\n  gen: summing\n")
    cfg = parse_config(make_parser(), config_file, args=[])
    assert cfg.sm.horizon == 12
    assert cfg.sm.gen == "summing"


def test_user_cli_overrides_config_file():
    config_file = io.StringIO("sm:\n  horizon: 12\n")
    cfg = parse_config(make_parser(), config_file, args=["--horizon", "14", "--svg"])
    assert cfg.sm.horizon == 14
    assert cfg.svg


def test_from_argparse_splits_provided_and_defaults():
    provided, defaults = OmegaConfExtended.from_argparse(
        make_parser(), args=["--horizon=9"]
    )
    assert provided.sm.horizon == 9
    assert "sm" not in defaults
    assert defaults.svg is False


def test_from_yaml(tmp_path):
    path = tmp_path / "exp.yml"
    path.write_text("ramsey:\n  delta: '0.9'\n  criterion: strict\n")
    cfg = validate_config(OmegaConfExtended.from_yaml(str(path)))
    assert cfg.ramsey.delta == "0.9"
    assert cfg.ramsey.criterion == "strict"
    assert cfg.ramsey.n_max == 12


@pytest.mark.parametrize(
    "raw",
    [
        {"sm": {"bogus": 1}},
        {"sm": {"horizon": "twelve"}},
        {"colour": "red"},
    ],
)
def test_validate_config_rejects(raw):
    with pytest.raises(InvalidConfig):
        validate_config(OmegaConf.create(raw))


def test_validate_config_needs_a_mapping():
    with pytest.raises(InvalidConfig):
        validate_config(OmegaConf.create([1, 2]))


def test_bad_config_file_is_rejected():
    with pytest.raises(InvalidConfig):
        parse_config(make_parser(), io.StringIO("norm:\n  trials: many\n"), args=[])


CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")


@pytest.mark.parametrize("name", ["density", "cesaro", "stabilize", "ctd", "compose"])
def test_shipped_experiment_configs_are_valid(name):
    cfg = validate_config(
        OmegaConfExtended.from_yaml(os.path.join(CONFIGS, f"{name}.yml"))
    )
    assert cfg.output_dir == f"results/{name}"


@pytest.mark.parametrize("name", TsirelsonPreset.to_list())
def test_shipped_presets_match_the_named_ones(name):
    from_file = load_tsirelson(os.path.join(CONFIGS, f"tsirelson.{name}.yml"))
    named = load_tsirelson(name)
    assert from_file.m_seq == named.m_seq
    assert from_file.n_seq == named.n_seq
    assert from_file.tail_tolerance == named.tail_tolerance


def test_shipped_corrupted_preset_is_rejected():
    with pytest.raises(InvalidConfig):
        load_tsirelson(os.path.join(CONFIGS, "tsirelson.corrupted.yml"))
