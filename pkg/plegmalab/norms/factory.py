from typing import Any, Dict, Mapping, Union

from omegaconf import DictConfig, OmegaConf

from plegmalab.norms.base import NormEngine
from plegmalab.norms.classical import C0Norm, LpNorm, SummingNorm
from plegmalab.norms.example import ExampleNorm
from plegmalab.norms.schreier import SchreierPlegmaticNorm
from plegmalab.norms.tsirelson import TsirelsonConfig, TsirelsonNorm
from plegmalab.util.errors import InvalidConfig

SUPPORTED_ENGINES = {
    "lp": LpNorm,
    "c0": C0Norm,
    "summing": SummingNorm,
    "example": ExampleNorm,
    "tsirelson_like": TsirelsonNorm,
    "schreier_plegmatic": SchreierPlegmaticNorm,
}
"""Engines selectable by name in JSON / YAML configs"""


def make_engine(config: Union[Mapping[str, Any], DictConfig, str]) -> NormEngine:
    """make_engine Instantiate a norm engine from its config

    Examples of configs:

        {"engine": "lp", "p": 2}
        {"engine": "schreier_plegmatic", "k": 1, "mode": "exact"}
        {"engine": "tsirelson_like", "preset": "desk"}
        {"engine": "tsirelson_like", "m_seq": [20, 400], "n_seq": [4, 100], "tail_tolerance": "1/63840000"}
        {"engine": "example", "k": 1, "base": {"engine": "lp", "p": 1}}

    Args:
        config (Union[Mapping, DictConfig, str]): Engine config, or just an engine name

    Raises:
        InvalidConfig: Unknown engine or bad parameters

    Returns:
        NormEngine: The engine
    """
    if isinstance(config, str):
        config = {"engine": config}

    if isinstance(config, DictConfig):
        config = OmegaConf.to_container(config, resolve=True)  # type: ignore

    cfg: Dict[str, Any] = dict(config)  # type: ignore
    name = cfg.pop("engine", None)

    if name not in SUPPORTED_ENGINES:
        raise InvalidConfig(
            f"The supported engines are {list(SUPPORTED_ENGINES.keys())}. You provided {name}"
        )

    if name == "example":
        base = make_engine(cfg.pop("base", {"engine": "lp", "p": 1}))

        return ExampleNorm(base, **cfg)

    if name == "tsirelson_like":
        preset = cfg.pop("preset", None)

        if "m_seq" in cfg:
            return TsirelsonNorm(config=TsirelsonConfig.from_dict(cfg).validate())

        return TsirelsonNorm(preset=preset or "desk")

    try:
        return SUPPORTED_ENGINES[name](**cfg)
    except TypeError as exc:
        raise InvalidConfig(f"Bad parameters for engine '{name}': {exc}")
