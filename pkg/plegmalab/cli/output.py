import os
from typing import Any, Dict, List, Optional, Sequence

from loguru import logger
from omegaconf import DictConfig, OmegaConf

from plegmalab.util.system import csv_dump, json_dump, safe_mkdirs

MANIFEST = "manifest.json"


def _svg_line_chart(
    series: Dict[str, List[float]], x: str, fname: str, title: str
) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed metadata keeps the svg byte-identical across runs
    plt.rcParams["svg.hashsalt"] = "plegma-lab"
    fig, ax = plt.subplots(figsize=(6, 4))

    for name, ys in series.items():
        if name != x:
            ax.plot(series[x], ys, marker="o", label=name)

    ax.set_xlabel(x)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(fname, format="svg", metadata={"Date": None})
    plt.close(fig)


class RunWriter:
    """RunWriter Writes the artifacts of one run into output_dir and keeps track of them

    CSV is the canonical tabular output. JSON is written with sorted keys. The manifest echoes
    the operation and the fully resolved config and lists every artifact.

    Args:
        output_dir (str): Directory for the artifacts, created if missing
        operation (str): e.g. "sm.cesaro"
        config (DictConfig): Resolved experiment config
        svg (bool): Also render traces as SVG line charts
    """

    def __init__(
        self,
        output_dir: str,
        operation: str,
        config: Optional[DictConfig] = None,
        svg: bool = False,
    ):
        self.output_dir = output_dir
        self.operation = operation
        self.config = config
        self.svg_enabled = svg
        self.artifacts: List[str] = []
        safe_mkdirs(output_dir)

    def _path(self, name: str) -> str:
        self.artifacts.append(name)

        return os.path.join(self.output_dir, name)

    def track(self, path: str) -> None:
        """List a file written by someone else, e.g. the run logfile"""
        self.artifacts.append(os.path.relpath(path, self.output_dir))

    def csv(
        self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]
    ) -> str:
        path = self._path(f"{name}.csv")
        written = csv_dump(header, rows, path)
        logger.info(f"Wrote {written} rows to {path}")

        return path

    def json(self, name: str, data: Any) -> str:
        path = self._path(f"{name}.json")
        json_dump(data, path)
        logger.info(f"Wrote {path}")

        return path

    def svg(
        self, name: str, series: Dict[str, List[float]], x: str = "n", title: str = ""
    ) -> Optional[str]:
        if not self.svg_enabled:
            return None

        path = self._path(f"{name}.svg")
        _svg_line_chart(series, x, path, title or self.operation)
        logger.info(f"Wrote {path}")

        return path

    def manifest(self, summary: Optional[Dict[str, Any]] = None) -> str:
        config: Any = {}

        if self.config is not None:
            config = OmegaConf.to_container(self.config, resolve=True)

        path = os.path.join(self.output_dir, MANIFEST)
        json_dump(
            {
                "operation": self.operation,
                "config": config,
                "artifacts": sorted(self.artifacts),
                "summary": summary or {},
            },
            path,
        )

        return path
