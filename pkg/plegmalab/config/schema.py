from dataclasses import dataclass, field
from typing import Any, Optional, Union

from omegaconf import DictConfig, ListConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from plegmalab.util.errors import InvalidConfig

# Values that may be given either as JSON strings on the command line or as YAML lists
# (families, vectors, functionals) are typed Any.


@dataclass
class PlegmaSection:
    family: Any = None
    flat: Any = None
    n: int = 5
    k: int = 2
    l: int = 2  # noqa: E741
    s: Any = None
    t: Any = None
    universe: str = "1..30"
    max_len: Optional[int] = None
    map: str = "initial"
    map_param: Any = None
    k2: Optional[int] = None
    target: Optional[int] = None
    paper_formula: bool = False


@dataclass
class RamseySection:
    coloring: str = "parity-sum"
    k: int = 2
    l: int = 2  # noqa: E741
    universe: str = "1..12"
    target: Optional[int] = None
    map: str = "initial"
    map_param: Any = None
    family: Any = None
    n: int = 6
    delta: str = "1/2"
    n_max: int = 12
    criterion: str = "floor"
    exact_limit: int = 45


@dataclass
class NormSection:
    engine: str = "schreier_plegmatic"
    k: int = 1
    vec: Any = None
    p: str = "2"
    preset: str = "desk"
    mode: str = "exact"
    base: str = "lp"
    base_p: str = "1"
    horizon: Optional[int] = None
    samples: int = 2000
    exact_bound: int = 12
    functional: Any = None
    trials: int = 20


@dataclass
class SeqSection:
    gen: str = "xk_basis"
    k: int = 1
    universe: str = "naturals"
    horizon: int = 8
    d: int = 1
    l: int = 2  # noqa: E741
    q: int = 2
    p: int = 1
    b: Any = None
    c: str = "1"
    eps_prime: str = "1/20"
    eps: Optional[str] = None
    tree: Optional[str] = None
    tree_k: int = 2
    tree_size: int = 8
    target: Optional[int] = None
    input: Optional[str] = None


@dataclass
class SmSection:
    gen: str = "xk_basis"
    k: int = 1
    universe: str = "naturals"
    l: int = 2  # noqa: E741
    m: int = 2
    q: int = 4
    horizon: int = 10
    mode: str = "exhaustive"
    samples: int = 200
    target_l: int = 3
    deltas: str = "1/2,1/4,1/8"
    n_min: Optional[int] = None
    n_max: int = 8
    functionals: Optional[str] = None
    vector: Any = None


@dataclass
class SelftestSection:
    quick: bool = False
    preset: Optional[str] = None


@dataclass
class ExperimentConfig:
    """ExperimentConfig Structured schema of a plegma-lab run

    command and action name the operation (e.g. "sm" and "cesaro"). Each module reads its own
    section. Every run writes a manifest echoing this whole config.
    """

    command: Optional[str] = None
    action: Optional[str] = None
    config: Optional[str] = None
    output_dir: str = "results"
    seed: int = 0
    logfile_prefix: Optional[str] = None
    svg: bool = False
    verbose: bool = False
    plegma: PlegmaSection = field(default_factory=PlegmaSection)
    ramsey: RamseySection = field(default_factory=RamseySection)
    norm: NormSection = field(default_factory=NormSection)
    seq: SeqSection = field(default_factory=SeqSection)
    sm: SmSection = field(default_factory=SmSection)
    selftest: SelftestSection = field(default_factory=SelftestSection)


def validate_config(config: Union[DictConfig, ListConfig]) -> DictConfig:
    """validate_config Merge a config into the ExperimentConfig schema

    Raises:
        InvalidConfig: Unknown keys, wrong types or a non mapping config

    Returns:
        DictConfig: The typed config, with schema defaults filled in
    """
    if not isinstance(config, DictConfig):
        raise InvalidConfig("An experiment config must be a mapping")

    try:
        merged = OmegaConf.merge(OmegaConf.structured(ExperimentConfig), config)
    except OmegaConfBaseException as exc:
        raise InvalidConfig(f"Invalid experiment config: {exc}")

    return merged  # type: ignore
