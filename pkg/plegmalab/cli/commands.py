from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from loguru import logger
from omegaconf import DictConfig, ListConfig, OmegaConf

from plegmalab.cli.output import RunWriter
from plegmalab.config.presets import load_tsirelson
from plegmalab.core import (
    Universe,
    enumerate_plegma,
    enumerate_plegma_paths,
    find_nonpreserving_witness,
    is_plegma,
    is_plegma_preserving,
    is_plegmatic,
    is_schreier_plegmatic,
    k_subsets,
    named_map,
    paper_formula_report,
    plegma_distance,
    plegma_path_between,
    shortest_plegma_path,
)
from plegmalab.norms import (
    BlockCertificate,
    ExampleNorm,
    LpNorm,
    NormEngine,
    SchreierPlegmaticNorm,
    SparseVec,
    TsirelsonNorm,
    WFunctional,
    block_lower_bound,
    example_norm_eval,
    make_engine,
    seminorm_violations,
    w_functional_eval,
)
from plegmalab.ramsey import (
    Coloring,
    density_threshold_scan,
    dichotomy_search,
    find_plegma_in_subset,
    largest_plegma_free,
    monochromatize,
    named_coloring,
)
from plegmalab.ramsey.density import SCAN_HEADER
from plegmalab.sequences import (
    CanonicalTreeDecomposition,
    KSeqGen,
    TreeMap,
    canonical_tree_extract,
    constant_seq,
    l1_renorm,
    make_generator,
    pair_blocks,
    random_tree_map,
    shifted_seq,
    verify_ctd,
)
from plegmalab.sequences.kseq import renorm_inner_tuples
from plegmalab.spreading import (
    cesaro_scan,
    coefficient_grid,
    composition_consistency,
    empirical_sm,
    l1_constant,
    sm_stabilize,
    splitting_check,
    zero_sum_equality,
)
from plegmalab.spreading.cesaro import CESARO_HEADER
from plegmalab.spreading.composition import COMPOSITION_HEADER
from plegmalab.spreading.estimate import ESTIMATE_HEADER, STABILIZE_HEADER
from plegmalab.spreading.l1 import SPLIT_HEADER
from plegmalab.util.errors import InvalidInput
from plegmalab.util.system import json_dumps, json_load, json_loads, seed_everything
from plegmalab.util.types import GenericDict, to_fraction

Handler = Callable[[DictConfig, RunWriter], GenericDict]


def _load(value: Any) -> Any:
    """JSON string from the command line, or a list / mapping from a YAML config"""
    if value is None:
        return None

    if isinstance(value, (DictConfig, ListConfig)):
        return OmegaConf.to_container(value, resolve=True)

    if isinstance(value, str):
        try:
            return json_loads(value)
        except ValueError as exc:
            raise InvalidInput(f"Cannot parse JSON argument {value!r}: {exc}")

    return value


def _require(value: Any, option: str) -> Any:
    value = _load(value)

    if value is None:
        raise InvalidInput(f"Missing required option {option}")

    return value


def _vector(value: Any, option: str = "--vec") -> SparseVec:
    """[[index, value], ...] or [{"index": ..., "value": ...}, ...]"""
    data = _require(value, option)

    if data and isinstance(data[0], dict):
        return SparseVec.from_json(data)

    try:
        return SparseVec((idx, v) for idx, v in data)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"Malformed vector {data}: {exc}")


def _generator(name: str, k: int) -> KSeqGen:
    params = {"k": k} if name in {"xk_basis", "xk_first_row", "constant"} else {}

    return make_generator(name, **params)


def _sets(family: Any) -> List[List[int]]:
    return [list(s) for s in family]


# plegma


def plegma_check(cfg: DictConfig, out: RunWriter) -> GenericDict:
    p = cfg.plegma
    family = _require(p.family, "--family")
    report: GenericDict = {"family": family, "plegma": is_plegma(family)}

    if len({len(s) for s in family}) == 1:
        report["plegmatic"] = is_plegmatic(family).feasible
        report["schreier_plegmatic"] = is_schreier_plegmatic(family).feasible

    if p.paper_formula:
        flat = _require(p.flat, "--flat")
        report["paper_formula"] = paper_formula_report(flat, p.k, p.l)

    out.json("check", report)

    return report


def plegma_enumerate(cfg: DictConfig, out: RunWriter) -> GenericDict:
    p = cfg.plegma
    universe = Universe.horizon(p.n)
    tuples = list(enumerate_plegma(universe, p.k, p.l))
    rows = [
        [
            i,
            " ".join(str(e) for e in sorted(e for s in t for e in s)),
            json_dumps(t.to_json()),
        ]
        for i, t in enumerate(tuples)
    ]
    out.csv("plegma", ["index", "flat", "tuple"], rows)

    if p.paper_formula:
        reports = [
            paper_formula_report(sorted(e for s in t for e in s), p.k, p.l)
            for t in tuples
        ]
        out.json("paper_formula", reports)

    return {"count": len(tuples)}


def plegma_path(cfg: DictConfig, out: RunWriter) -> GenericDict:
    p = cfg.plegma
    s, t = _require(p.s, "--s"), _require(p.t, "--t")
    universe = Universe.parse(p.universe)

    try:
        constructed: Optional[List[List[int]]] = _sets(
            plegma_path_between(s, t, universe)
        )
    except InvalidInput as exc:
        logger.warning(f"No constructed path: {exc}")
        constructed = None

    shortest = shortest_plegma_path(s, t, universe)
    report = {
        "s": s,
        "t": t,
        "constructed": constructed,
        "shortest": None if shortest is None else _sets(shortest),
        "distance": None if shortest is None else len(shortest) - 1,
    }
    out.json("path", report)

    return report


def plegma_distance_cmd(cfg: DictConfig, out: RunWriter) -> GenericDict:
    p = cfg.plegma
    s, t = _require(p.s, "--s"), _require(p.t, "--t")
    universe = Universe.parse(p.universe)
    report: GenericDict = {"s": s, "t": t, "distance": plegma_distance(s, t, universe)}

    if p.max_len is not None:
        report["paths_up_to_max_len"] = sum(
            1 for _ in enumerate_plegma_paths(s, t, universe, p.max_len)
        )

    out.json("distance", report)

    return report


def plegma_preserve(cfg: DictConfig, out: RunWriter) -> GenericDict:
    p = cfg.plegma
    fn = named_map(p.map, **(_load(p.map_param) or {}))
    universe = Universe.parse(p.universe)
    res = is_plegma_preserving(fn, universe, p.k)
    witness = res.counterexample
    report: GenericDict = {
        "map": p.map,
        "preserving": res.preserving,
        "checked": res.checked,
        "counterexample": None if witness is None else witness.to_json(),
        "images": res.images,
    }

    if p.k2 is not None:
        witness = find_nonpreserving_witness(
            fn, universe, p.k, p.k2, target_size=p.target
        )
        report["witness"] = {"found": witness.found, "subuniverse": witness.subuniverse}

    out.json("preserve", report)

    return report


# ramsey


def ramsey_mono(cfg: DictConfig, out: RunWriter) -> GenericDict:
    r = cfg.ramsey
    universe = Universe.parse(r.universe)
    coloring = Coloring.from_function(universe, r.k, r.l, named_coloring(r.coloring))
    res = monochromatize(coloring, r.target or r.k * r.l + 1)
    report = {
        "found": res.found,
        "requested": res.requested,
        "subuniverse": res.subuniverse,
        "color": res.color,
        "verified": res.verified,
    }
    out.json("mono", report)

    return report


def ramsey_dichotomy(cfg: DictConfig, out: RunWriter) -> GenericDict:
    r = cfg.ramsey
    res = dichotomy_search(
        named_map(r.map, **(_load(r.map_param) or {})), Universe.parse(r.universe), r.k
    )
    report = {
        "alternative": res.alternative,
        "subuniverse": res.subuniverse,
        "label": list(res.label) if isinstance(res.label, tuple) else res.label,
        "verified": res.verified,
        "sizes": dict(res.sizes),
    }
    out.json("dichotomy", report)

    return report


def ramsey_find(cfg: DictConfig, out: RunWriter) -> GenericDict:
    r = cfg.ramsey
    found = find_plegma_in_subset(_require(r.family, "--family"), r.l)
    report = {
        "found": found is not None, "tuple": None if found is None else found.to_json()
    }
    out.json("find", report)

    return report


def ramsey_free(cfg: DictConfig, out: RunWriter) -> GenericDict:
    r = cfg.ramsey
    res = largest_plegma_free(r.n, r.k, r.l, exact_limit=r.exact_limit)
    report = {
        "n": res.n,
        "k": res.k,
        "l": res.l,
        "size": res.size,
        "witness": _sets(res.witness),
        "exact": res.exact,
    }
    out.json("free", report)

    return report


def ramsey_density(cfg: DictConfig, out: RunWriter) -> GenericDict:
    r = cfg.ramsey
    scan = density_threshold_scan(
        r.k,
        r.l,
        to_fraction(r.delta),
        r.n_max,
        criterion=r.criterion,
        exact_limit=r.exact_limit,
    )
    out.csv("density", SCAN_HEADER, scan.table())
    free = scan.counterexample
    report = {
        "delta": str(scan.delta),
        "criterion": scan.criterion,
        "found": scan.found,
        "threshold_n": scan.threshold_n,
        "sufficient_n": scan.sufficient_n,
        "exact": scan.exact,
        "counterexample": None if free is None else _sets(free),
    }
    out.json("density", report)
    out.svg(
        "density",
        {
            "n": [row[0] for row in scan.table()],
            "largest_free": [row[2] for row in scan.table()],
        },
        title=f"largest plegma-free sets, k={r.k}, l={r.l}",
    )

    return report


# norm


def _engine(cfg: DictConfig) -> NormEngine:
    n = cfg.norm

    if n.engine == "tsirelson_like":
        return TsirelsonNorm(config=load_tsirelson(n.preset))

    if n.engine == "schreier_plegmatic":
        return SchreierPlegmaticNorm(n.k, mode=n.mode, exact_bound=n.exact_bound)

    if n.engine == "lp":
        return LpNorm(n.p)

    if n.engine == "example":
        base = make_engine(
            {"engine": "lp", "p": n.base_p} if n.base == "lp" else n.base
        )

        return ExampleNorm(base, k=n.k, mode=n.mode, samples=n.samples, seed=cfg.seed)

    return make_engine(n.engine)


def _evaluate(cfg: DictConfig, engine: NormEngine, x: SparseVec):
    n = cfg.norm

    if isinstance(engine, ExampleNorm) and n.horizon is not None:
        return example_norm_eval(
            engine.base,
            engine.k,
            x,
            mode=n.mode,
            horizon=n.horizon,
            samples=n.samples,
            seed=cfg.seed,
        )

    return engine.evaluate(x)


def norm_eval(cfg: DictConfig, out: RunWriter) -> GenericDict:
    engine = _engine(cfg)
    x = _vector(cfg.norm.vec)
    value = _evaluate(cfg, engine, x)
    report = {
        "engine": engine.describe(), "vector": x.to_json(), "norm": value.to_json()
    }
    out.json("norm", report)
    logger.info(f"||x|| = {value.value}")

    return {"value": value.value, "exact": value.is_exact}


def norm_certify(cfg: DictConfig, out: RunWriter) -> GenericDict:
    engine = _engine(cfg)
    x = _vector(cfg.norm.vec)
    value = _evaluate(cfg, engine, x)
    report: GenericDict = {"engine": engine.describe(), "norm": value.to_json()}
    given = _load(cfg.norm.functional)

    if given is not None:
        f = WFunctional.from_json(given)
        fx = w_functional_eval(f, x)
        report["functional"] = {
            "value": fx.value,
            "lower_bound_ok": fx.value <= value.value + 1e-12,
            "attains": fx.square is not None and fx.square == value.square,
        }

    cert = value.certificate if value.certificate is not None else engine.certify(x)

    if isinstance(cert, WFunctional):
        fx = w_functional_eval(cert, x)
        report["certificate"] = {
            "functional": cert.to_json(), "attains": fx.square == value.square
        }
    elif isinstance(cert, BlockCertificate):
        assert isinstance(engine, TsirelsonNorm)
        lower = block_lower_bound(engine.config, x, cert)
        report["certificate"] = {
            **cert.to_json(),
            "reevaluated": lower,
            "attains": lower <= value.value + 1e-9,
        }

    out.json("certify", report)

    return {
        "value": value.value,
        "certified": bool(report.get("certificate", {}).get("attains", False)),
    }


def norm_selfcheck(cfg: DictConfig, out: RunWriter) -> GenericDict:
    n = cfg.norm
    engine = _engine(cfg)
    rng = seed_everything(cfg.seed)
    indexed_by_sets = isinstance(engine, (SchreierPlegmaticNorm, ExampleNorm))
    pool: List[Any]

    if indexed_by_sets:
        pool = list(k_subsets(Universe.horizon(8), n.k + 1))
    else:
        pool = list(range(1, 21))
    vectors = []

    for _ in range(n.trials):
        size = int(rng.integers(1, 5))
        picks = rng.choice(len(pool), size=size, replace=False)
        coeffs = [Fraction(int(rng.integers(-4, 5)), 4) for _ in picks]
        vectors.append(SparseVec((pool[int(i)], a) for i, a in zip(picks, coeffs)))

    violations = seminorm_violations(engine, vectors)
    report = {
        "engine": engine.describe(),
        "trials": n.trials,
        "violations": [[kind, str(detail)] for kind, detail in violations],
    }
    out.json("selfcheck", report)

    if violations:
        logger.error(f"{len(violations)} seminorm violations for {engine}")

    return {"violations": len(violations)}


# seq


def seq_gen(cfg: DictConfig, out: RunWriter) -> GenericDict:
    s = cfg.seq
    gen = _generator(s.gen, s.k)
    universe = Universe.parse(s.universe).truncate(s.horizon)
    rows = [
        [
            " ".join(str(e) for e in sub),
            json_dumps(gen.vec(sub).to_json()),
            gen.norm(gen.vec(sub)),
        ]
        for sub in k_subsets(universe, gen.k)
    ]
    out.csv("sequence", ["s", "vector", "norm"], rows)
    bound = max((r[2] for r in rows), default=0.0)
    out.json(
        "sequence", {"generator": gen.describe(), "bound": bound, "count": len(rows)}
    )

    return {"count": len(rows), "bound": bound}


def seq_compose(cfg: DictConfig, out: RunWriter) -> GenericDict:
    s = cfg.seq

    if s.d != 1:
        raise InvalidInput(
            "The built-in outer sequence y_t = e_{2t-1} + e_{2t} has arity d=1"
        )

    x = _generator(s.gen, s.k)
    report = composition_consistency(
        x,
        pair_blocks,
        LpNorm(2),
        Universe.parse(s.universe),
        l=s.l,
        q=s.q,
        horizon=s.horizon,
        d=s.d,
    )
    out.csv("composition", COMPOSITION_HEADER, report.rows)
    out.json("composition", report.to_json())

    return report.to_json()


def seq_renorm(cfg: DictConfig, out: RunWriter) -> GenericDict:
    s = cfg.seq
    x = _generator(s.gen, s.k)
    universe = Universe.parse(s.universe)
    b = _load(s.b) or [1] * s.p
    y = l1_renorm(x, s.p, b, s.c, s.eps_prime, universe, eps=s.eps)
    rows = []

    for sub in k_subsets(Universe.horizon(s.horizon), x.k):
        inner = renorm_inner_tuples(sub, s.p, universe)
        rows.append(
            [" ".join(str(e) for e in sub), y.norm(y.vec(sub)), is_plegma(inner)]
        )

    out.csv("renorm", ["s", "norm", "inner_plegma"], rows)
    report = {
        "generator": y.describe(),
        "count": len(rows),
        "all_inner_plegma": all(r[2] for r in rows),
    }
    out.json("renorm", report)

    return report


def seq_ctd_extract(cfg: DictConfig, out: RunWriter) -> GenericDict:
    s = cfg.seq

    if s.tree is not None:
        phi = TreeMap.from_json(json_load(s.tree))
    else:
        phi = random_tree_map(Universe.horizon(s.tree_size), s.tree_k, seed=cfg.seed)

    res = canonical_tree_extract(phi, target_size=s.target)
    verification = verify_ctd(res.decomposition)
    out.json("tree", phi.to_json())
    checked = {"ok": verification.ok, "violation": verification.violation}
    out.json("ctd", {**res.to_json(), "verification": checked})

    return {
        "size": len(res.universe),
        "complete": res.complete,
        "within_tolerance": res.within_tolerance,
        "verified": verification.ok,
    }


def seq_ctd_verify(cfg: DictConfig, out: RunWriter) -> GenericDict:
    data = json_load(_require(cfg.seq.input, "--input"))
    d = CanonicalTreeDecomposition.from_json(data.get("decomposition", data))
    verification = verify_ctd(d)
    report = {
        "ok": verification.ok,
        "violation": verification.violation,
        "checked": verification.checked,
    }
    out.json("verify", report)

    return report


# sm


def _deltas(raw: str) -> List[Fraction]:
    try:
        return [to_fraction(d) for d in str(raw).split(",") if d.strip()]
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"Cannot parse deltas '{raw}'")


def sm_estimate(cfg: DictConfig, out: RunWriter) -> GenericDict:
    m = cfg.sm
    gen = _generator(m.gen, m.k)
    est = empirical_sm(
        gen,
        Universe.parse(m.universe),
        m.l,
        m.m,
        coefficient_grid(m.m, m.q),
        m.horizon,
        mode=m.mode,
        samples=m.samples,
        seed=cfg.seed,
        grid=f"linf q={m.q}",
    )
    out.csv("estimate", ESTIMATE_HEADER, est.rows())
    out.json("estimate", est.to_json())

    return {"tuples": est.tuples, "width": est.width, "empty": est.empty}


def sm_stabilize_cmd(cfg: DictConfig, out: RunWriter) -> GenericDict:
    m = cfg.sm
    gen = _generator(m.gen, m.k)
    table = sm_stabilize(
        gen,
        _deltas(m.deltas),
        m.target_l,
        m.horizon,
        universe=Universe.parse(m.universe),
        q=m.q,
    )
    out.csv("stabilize", STABILIZE_HEADER, table.table())
    report = {
        "universe": table.universe.elements(),
        "sparsified": table.sparsified.elements(),
        "removed": table.removed,
        "partial": table.partial,
        "complete": table.complete,
    }
    out.json("stabilize", report)

    return report


def sm_l1(cfg: DictConfig, out: RunWriter) -> GenericDict:
    m = cfg.sm
    est = l1_constant(
        _generator(m.gen, m.k),
        Universe.parse(m.universe),
        m.l,
        q=m.q,
        horizon=m.horizon,
    )
    out.json("l1", est.to_json())

    return est.to_json()


def sm_split(cfg: DictConfig, out: RunWriter) -> GenericDict:
    m = cfg.sm
    x = _generator(m.gen, m.k)
    universe = Universe.parse(m.universe)

    if m.vector is not None:
        v = _vector(m.vector, "--vector")
    else:
        v = x.vec(universe.first(x.k))

    x1, x2 = shifted_seq(x, v), constant_seq(v, x.k, x.ambient)
    report = splitting_check(x, x1, x2, universe, m.l, q=m.q, horizon=m.horizon)
    zero_sum = zero_sum_equality(
        x, v, universe, m.l, coefficient_grid(m.l, m.q), m.horizon
    )
    out.csv("split", SPLIT_HEADER, report.table())
    out.json("split", {**report.to_json(), "zero_sum_violation": zero_sum})

    return {"holds": report.holds, "zero_sum_equal": zero_sum is None}


def sm_cesaro(cfg: DictConfig, out: RunWriter) -> GenericDict:
    m = cfg.sm
    gen = _generator(m.gen, m.k)
    n_min = m.n_min if m.n_min is not None else (1 if m.functionals else gen.k)
    trace = cesaro_scan(
        gen,
        Universe.parse(m.universe),
        range(n_min, m.n_max + 1),
        functionals=m.functionals,
    )
    out.csv("cesaro", CESARO_HEADER, trace.table())
    out.json("cesaro", trace.to_json())
    out.svg("cesaro", trace.series(), title=f"Cesaro means of {gen.name}")
    matches = all(
        r.functional == r.analytic for r in trace.rows if r.analytic is not None
    )

    return {"rows": len(trace.rows), "functional_matches_closed_form": matches}


COMMANDS: Dict[str, Handler] = {
    "plegma.check": plegma_check,
    "plegma.enumerate": plegma_enumerate,
    "plegma.path": plegma_path,
    "plegma.distance": plegma_distance_cmd,
    "plegma.preserve": plegma_preserve,
    "ramsey.mono": ramsey_mono,
    "ramsey.dichotomy": ramsey_dichotomy,
    "ramsey.find": ramsey_find,
    "ramsey.free": ramsey_free,
    "ramsey.density": ramsey_density,
    "norm.eval": norm_eval,
    "norm.certify": norm_certify,
    "norm.selfcheck": norm_selfcheck,
    "seq.gen": seq_gen,
    "seq.compose": seq_compose,
    "seq.renorm": seq_renorm,
    "seq.ctd-extract": seq_ctd_extract,
    "seq.ctd-verify": seq_ctd_verify,
    "sm.estimate": sm_estimate,
    "sm.stabilize": sm_stabilize_cmd,
    "sm.l1": sm_l1,
    "sm.split": sm_split,
    "sm.cesaro": sm_cesaro,
}
"""Handlers by "command.action". Each writes its artifacts and returns a summary for the manifest"""
