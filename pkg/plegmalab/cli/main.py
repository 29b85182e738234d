import argparse
import sys
from typing import List, Optional

from loguru import logger
from omegaconf import DictConfig
from omegaconf.errors import OmegaConfBaseException

from plegmalab.cli.commands import COMMANDS
from plegmalab.cli.output import RunWriter
from plegmalab.cli.selftest import run_selftest
from plegmalab.config.config_parser import parse_config
from plegmalab.util.errors import InvalidConfig, InvalidInput, ScaleRefusal
from plegmalab.util.log import configure_logging, run_log

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_INVALID = 2
EXIT_SCALE_REFUSAL = 3

# JSON arguments, e.g. --family '[[1,3],[2,4]]' or --vec '[[[1,3],1],[[2,4],1]]'
JSON_HELP = "JSON literal"


def _add_plegma(sub: argparse._SubParsersAction) -> None:
    plegma = sub.add_parser("plegma", help="Plegma families of finite subsets of N")
    actions = plegma.add_subparsers(dest="action", required=True)

    check = actions.add_parser(
        "check", help="Is a family plegma, plegmatic, Schreier plegmatic"
    )
    check.add_argument(
        "--family", dest="plegma.family", help=f"{JSON_HELP}: list of sets"
    )
    check.add_argument(
        "--flat", dest="plegma.flat", help=f"{JSON_HELP}: kl increasing integers"
    )
    check.add_argument(
        "--k", dest="plegma.k", type=int, help="Cardinality of the members"
    )
    check.add_argument("--l", dest="plegma.l", type=int, help="Number of members")
    check.add_argument(
        "--paper-formula",
        dest="plegma.paper_formula",
        action="store_true",
        help="Report the printed index formula next to the corrected one on --flat",
    )

    enum = actions.add_parser(
        "enumerate", help="All plegma l-tuples of k-subsets of {1..n}"
    )
    enum.add_argument("--n", dest="plegma.n", type=int, help="Horizon")
    enum.add_argument(
        "--k", dest="plegma.k", type=int, help="Cardinality of the members"
    )
    enum.add_argument("--l", dest="plegma.l", type=int, help="Tuple length")
    enum.add_argument(
        "--paper-formula", dest="plegma.paper_formula", action="store_true"
    )

    for name, help_ in [
        ("path", "Constructed and shortest plegma path from s to t"),
        ("distance", "Plegma path distance from s to t"),
    ]:
        p = actions.add_parser(name, help=help_)
        p.add_argument("--s", dest="plegma.s", help=f"{JSON_HELP}: start set")
        p.add_argument("--t", dest="plegma.t", help=f"{JSON_HELP}: end set")
        p.add_argument(
            "--universe",
            dest="plegma.universe",
            help="e.g. 1..30, naturals, evens, 2,5,9",
        )

        if name == "distance":
            p.add_argument(
                "--max-len",
                dest="plegma.max_len",
                type=int,
                help="Also count paths up to this length",
            )

    preserve = actions.add_parser(
        "preserve", help="Does a set map preserve plegma pairs"
    )
    preserve.add_argument(
        "--map", dest="plegma.map", help="initial, coords, constant or pad"
    )
    preserve.add_argument(
        "--map-param", dest="plegma.map_param", help=f"{JSON_HELP}: map parameters"
    )
    preserve.add_argument("--universe", dest="plegma.universe")
    preserve.add_argument("--k", dest="plegma.k", type=int, help="Domain cardinality")
    preserve.add_argument(
        "--k2",
        dest="plegma.k2",
        type=int,
        help="Codomain cardinality, searches a witness",
    )
    preserve.add_argument(
        "--target", dest="plegma.target", type=int, help="Requested witness size"
    )


def _add_ramsey(sub: argparse._SubParsersAction) -> None:
    ramsey = sub.add_parser("ramsey", help="Finite Ramsey searches over plegma tuples")
    actions = ramsey.add_subparsers(dest="action", required=True)

    mono = actions.add_parser(
        "mono", help="Monochromatic sub-universe of a plegma coloring"
    )
    mono.add_argument(
        "--coloring",
        dest="ramsey.coloring",
        help="parity-sum, first-min-parity, constant",
    )
    mono.add_argument("--k", dest="ramsey.k", type=int)
    mono.add_argument("--l", dest="ramsey.l", type=int)
    mono.add_argument("--universe", dest="ramsey.universe")
    mono.add_argument(
        "--target", dest="ramsey.target", type=int, help="Requested size, default kl+1"
    )

    dich = actions.add_parser(
        "dichotomy", help="Constant or injective restriction of a set map"
    )
    dich.add_argument("--map", dest="ramsey.map")
    dich.add_argument(
        "--map-param", dest="ramsey.map_param", help=f"{JSON_HELP}: map parameters"
    )
    dich.add_argument("--k", dest="ramsey.k", type=int)
    dich.add_argument("--universe", dest="ramsey.universe")

    find = actions.add_parser("find", help="A plegma l-tuple inside a finite family")
    find.add_argument(
        "--family", dest="ramsey.family", help=f"{JSON_HELP}: list of k-sets"
    )
    find.add_argument("--l", dest="ramsey.l", type=int)

    free = actions.add_parser(
        "free", help="Largest plegma-free family of k-subsets of {1..n}"
    )
    free.add_argument("--n", dest="ramsey.n", type=int)
    free.add_argument("--k", dest="ramsey.k", type=int)
    free.add_argument("--l", dest="ramsey.l", type=int)
    free.add_argument("--exact-limit", dest="ramsey.exact_limit", type=int)

    dens = actions.add_parser(
        "density", help="Smallest n forcing a plegma tuple in every delta-dense family"
    )
    dens.add_argument("--k", dest="ramsey.k", type=int)
    dens.add_argument("--l", dest="ramsey.l", type=int)
    dens.add_argument("--delta", dest="ramsey.delta", help="Density, e.g. 1/2 or 0.9")
    dens.add_argument("--n-max", dest="ramsey.n_max", type=int)
    dens.add_argument(
        "--criterion", dest="ramsey.criterion", choices=["floor", "strict"]
    )
    dens.add_argument("--exact-limit", dest="ramsey.exact_limit", type=int)


def _add_norm(sub: argparse._SubParsersAction) -> None:
    norm = sub.add_parser("norm", help="Norm engines on finitely supported vectors")
    actions = norm.add_subparsers(dest="action", required=True)

    for name, help_ in [
        ("eval", "Evaluate a norm"),
        ("certify", "Evaluate and check a norming certificate"),
        ("selfcheck", "Seminorm axioms on random vectors"),
    ]:
        p = actions.add_parser(name, help=help_)
        p.add_argument(
            "--engine",
            dest="norm.engine",
            help="lp, c0, summing, example, tsirelson_like, schreier_plegmatic",
        )
        p.add_argument("--k", dest="norm.k", type=int)
        p.add_argument(
            "--p", dest="norm.p", help="Exponent of the lp engine, 1 <= p <= inf"
        )
        p.add_argument(
            "--preset", dest="norm.preset", help="desk, compact, paper or a YAML file"
        )
        p.add_argument("--mode", dest="norm.mode", help="exact, greedy or sampled")
        p.add_argument(
            "--base", dest="norm.base", help="Base engine of the example norm"
        )
        p.add_argument("--base-p", dest="norm.base_p", help="Exponent of an lp base")
        p.add_argument("--horizon", dest="norm.horizon", type=int)
        p.add_argument("--samples", dest="norm.samples", type=int)
        p.add_argument("--exact-bound", dest="norm.exact_bound", type=int)

        if name == "selfcheck":
            p.add_argument("--trials", dest="norm.trials", type=int)
        else:
            p.add_argument(
                "--vec", dest="norm.vec", help=f"{JSON_HELP}: [[index, value], ...]"
            )

        if name == "certify":
            p.add_argument(
                "--functional",
                dest="norm.functional",
                help=f"{JSON_HELP}: a functional to check",
            )


def _add_seq(sub: argparse._SubParsersAction) -> None:
    seq = sub.add_parser("seq", help="k-sequences and their constructions")
    actions = seq.add_subparsers(dest="action", required=True)

    for name, help_ in [
        ("gen", "Tabulate a named generator"),
        ("compose", "Composition of a k-sequence with an outer sequence"),
        ("renorm", "l1 renormalisation of a k-sequence"),
    ]:
        p = actions.add_parser(name, help=help_)
        p.add_argument("--gen", dest="seq.gen")
        p.add_argument("--k", dest="seq.k", type=int)
        p.add_argument("--universe", dest="seq.universe")
        p.add_argument("--horizon", dest="seq.horizon", type=int)

        if name == "compose":
            p.add_argument("--d", dest="seq.d", type=int)
            p.add_argument("--l", dest="seq.l", type=int)
            p.add_argument("--q", dest="seq.q", type=int)

        if name == "renorm":
            p.add_argument("--p", dest="seq.p", type=int, help="Number of inner blocks")
            p.add_argument(
                "--b",
                dest="seq.b",
                help=f"{JSON_HELP}: coefficients with sum |b_i| = 1",
            )
            p.add_argument("--c", dest="seq.c")
            p.add_argument("--eps-prime", dest="seq.eps_prime")
            p.add_argument("--eps", dest="seq.eps")

    extract = actions.add_parser(
        "ctd-extract", help="Canonical tree decomposition of a tree map"
    )
    extract.add_argument(
        "--tree", dest="seq.tree", help="JSON file with a tree map. Random when omitted"
    )
    extract.add_argument("--tree-k", dest="seq.tree_k", type=int)
    extract.add_argument("--tree-size", dest="seq.tree_size", type=int)
    extract.add_argument("--target", dest="seq.target", type=int)

    verify = actions.add_parser("ctd-verify", help="Check a stored tree decomposition")
    verify.add_argument(
        "--input", dest="seq.input", help="JSON file written by ctd-extract"
    )


def _add_sm(sub: argparse._SubParsersAction) -> None:
    sm = sub.add_parser("sm", help="Empirical k-spreading models")
    actions = sm.add_subparsers(dest="action", required=True)

    for name, help_ in [
        ("estimate", "Sup / inf of norms over admissible plegma tuples"),
        ("stabilize", "Sparsify until the estimates stabilize"),
        ("l1", "Lower l1 constant of the spreading model"),
        ("split", "Splitting of a sequence into a shifted and a constant part"),
        ("cesaro", "Norms of the k-Cesaro means"),
    ]:
        p = actions.add_parser(name, help=help_)
        p.add_argument("--gen", dest="sm.gen")
        p.add_argument("--k", dest="sm.k", type=int)
        p.add_argument("--universe", dest="sm.universe")

        if name == "cesaro":
            p.add_argument("--n-min", dest="sm.n_min", type=int)
            p.add_argument("--n-max", dest="sm.n_max", type=int)
            p.add_argument("--functionals", dest="sm.functionals", choices=["paper"])

            continue

        p.add_argument("--horizon", dest="sm.horizon", type=int)
        p.add_argument("--q", dest="sm.q", type=int, help="Coefficient grid resolution")

        if name == "stabilize":
            p.add_argument("--target-l", dest="sm.target_l", type=int)
            p.add_argument(
                "--deltas", dest="sm.deltas", help="Comma separated, e.g. 1/2,1/4,1/8"
            )

            continue

        p.add_argument("--l", dest="sm.l", type=int)

        if name == "estimate":
            p.add_argument("--m", dest="sm.m", type=int, help="Number of coefficients")
            p.add_argument("--mode", dest="sm.mode", choices=["exhaustive", "sampled"])
            p.add_argument("--samples", dest="sm.samples", type=int)

        if name == "split":
            p.add_argument(
                "--vector", dest="sm.vector", help=f"{JSON_HELP}: the constant part"
            )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        "plegma-lab",
        description="Plegma combinatorics, norm engines and empirical k-spreading models",
    )
    parser.add_argument("--config", dest="config", help="YAML experiment config")
    parser.add_argument(
        "--output-dir", dest="output_dir", help="Where artifacts are written"
    )
    parser.add_argument("--seed", dest="seed", type=int)
    parser.add_argument("--logfile-prefix", dest="logfile_prefix")
    parser.add_argument(
        "--svg", dest="svg", action="store_true", help="Also render traces as SVG"
    )
    parser.add_argument("--verbose", dest="verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    _add_plegma(sub)
    _add_ramsey(sub)
    _add_norm(sub)
    _add_seq(sub)
    _add_sm(sub)

    selftest = sub.add_parser("selftest", help="Run the acceptance checks")
    selftest.add_argument("--quick", dest="selftest.quick", action="store_true")
    selftest.add_argument(
        "--preset",
        dest="selftest.preset",
        help="Validate a Tsirelson preset name or file",
    )

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    known = parser.parse_args(argv)
    configure_logging(level="DEBUG" if known.verbose else "INFO")

    try:
        cfg = parse_config(parser, known.config, args=argv)
    except (InvalidConfig, InvalidInput, OmegaConfBaseException) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")

        return EXIT_INVALID

    operation = cfg.command if cfg.action is None else f"{cfg.command}.{cfg.action}"

    with run_log(cfg.output_dir, operation, cfg.logfile_prefix) as logfile:
        return run(cfg, operation, logfile)


def run(cfg: DictConfig, operation: str, logfile: Optional[str] = None) -> int:
    """Run one resolved operation and map its failures to exit codes"""
    try:
        writer = RunWriter(cfg.output_dir, operation, config=cfg, svg=cfg.svg)

        if logfile is not None:
            writer.track(logfile)

        if cfg.command == "selftest":
            report = run_selftest(cfg, writer)
            writer.manifest(report)

            return EXIT_OK if report["passed"] else EXIT_SELFTEST_FAILED

        summary = COMMANDS[operation](cfg, writer)
        writer.manifest(summary)
    except ScaleRefusal as exc:
        logger.error(f"Refused: {exc}")

        return EXIT_SCALE_REFUSAL
    except (InvalidConfig, InvalidInput, OmegaConfBaseException) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")

        return EXIT_INVALID

    logger.info(f"{operation} done. Artifacts in {cfg.output_dir}")

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
