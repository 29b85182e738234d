import os
from enum import Enum
from typing import List

from plegmalab.config.omegaconf import OmegaConfExtended as OmegaConf
from plegmalab.norms.tsirelson import TsirelsonConfig
from plegmalab.util.errors import InvalidConfig


class TsirelsonPreset(Enum):
    """TsirelsonPreset Named parameter sets of the Tsirelson-type norm

        * DESK: m = (10,), n = (100,). The continuation m_j = 10^j has tail 1/9900
        * COMPACT: m = (20, 400), n = (4, 100). Short enough for exact averages of length n_2
        * PAPER: m_j = 100^j, n_j = 100^{j(j+1)/2} for j <= 3
    """

    DESK = {"m_seq": [10], "n_seq": [100], "tail_tolerance": "1/9900"}
    COMPACT = {"m_seq": [20, 400], "n_seq": [4, 100], "tail_tolerance": "1/63840000"}
    PAPER = {
        "m_seq": [100, 10 ** 4, 10 ** 6],
        "n_seq": [100, 10 ** 6, 10 ** 12],
        "tail_tolerance": "1/9999000000000000",
    }

    @classmethod
    def to_list(cls) -> List[str]:
        return [p.name.lower() for p in cls]


def load_tsirelson(preset: str) -> TsirelsonConfig:
    """load_tsirelson Tsirelson config from a preset name or a YAML file

    Files hold m_seq, n_seq, tail_tolerance and optionally name.

    Raises:
        InvalidConfig: Unknown preset, unreadable file or invalid parameters
    """
    if not os.path.isfile(preset):
        return TsirelsonConfig.preset(preset)

    try:
        raw = OmegaConf.to_container(OmegaConf.from_yaml(preset), resolve=True)
    except Exception as exc:
        raise InvalidConfig(f"Cannot read Tsirelson config {preset}: {exc}")

    if not isinstance(raw, dict):
        raise InvalidConfig(f"{preset} does not hold a mapping")

    raw.setdefault("name", os.path.basename(preset))

    return TsirelsonConfig.from_dict(raw).validate()
