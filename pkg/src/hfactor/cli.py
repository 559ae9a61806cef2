"""Command-line harness: one subcommand per experiment, seeded and file-backed.

Reports are written as JSON (default) or CSV.  Identical configs, seed
included, produce byte-identical output bodies.  Exit codes: 0 success, 1
invalid input, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, asdict, is_dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from . import embed, entropy, factor, host, pattern, polynomial, process, thresholds
from .errors import InputError, InvariantError

COMMANDS = (
    "analyze", "count", "scan", "trace", "martingale-check", "shearer",
    "window", "weight-lemma", "poly", "models", "regularity",
)


@dataclass
class RunConfig:
    command: str
    pattern_path: str | None = None
    host_path: str | None = None
    weights_path: str | None = None
    n: int | None = None
    n_list: tuple[int, ...] | None = None
    p: float | None = None
    m_edges: int | None = None
    trials: int = 200
    seed: int = 0
    t_max: int | None = None
    eps: float = 0.5
    beta: float = 10.0
    bound: float = 1.0
    v: int | None = None
    target: float = 0.5
    property_name: str = "factor"
    mode: str = "profile"
    theorem: str = "relative-low-order"
    collapse: bool = False
    anchor_role: int | None = None
    anchor_vertex: int | None = None
    b_level: float = 10.0
    sweep: bool = False
    workers: int = 1
    out_path: str | None = None
    format: str = "json"


def _fmt_float(x: float) -> str:
    if x != x:
        return "nan"
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, float):
        if obj in (math.inf, -math.inf) or obj != obj:
            return _fmt_float(obj)
        return obj
    return obj


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(report, cfg: RunConfig, csv_rows=None, csv_header=None) -> None:
    """JSON dump, or module CSV when a schema is given, else flat key CSV."""
    if cfg.format == "json":
        _write_output(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", cfg.out_path)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if csv_rows is not None:
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow(row)
    else:
        writer.writerow(["key", "value"])
        for key, value in _flatten(_jsonable(report)):
            writer.writerow([key, value])
    _write_output(buf.getvalue(), cfg.out_path)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        key = prefix[:-1] if prefix.endswith(".") else prefix
        if isinstance(obj, float):
            obj = _fmt_float(obj)
        yield key, obj


def _load_pattern(cfg: RunConfig) -> pattern.PatternGraph:
    if not cfg.pattern_path:
        raise InputError("this command needs --pattern")
    return pattern.parse_pattern(Path(cfg.pattern_path).read_text(encoding="utf-8"))


def _load_host(cfg: RunConfig) -> host.HostGraph:
    if not cfg.host_path:
        raise InputError("this command needs --host")
    return host.parse_host(Path(cfg.host_path).read_text(encoding="utf-8"))


def _need(cfg: RunConfig, name: str):
    value = getattr(cfg, name)
    if value is None:
        raise InputError(f"this command needs --{name.replace('_', '-')}")
    return value


def _cmd_analyze(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    prof = pattern.density_profile(p)
    report = {
        "k": p.k,
        "v": p.v,
        "m": p.m,
        "density": prof.density,
        "max_density": prof.max_density,
        "per_vertex": {
            str(x): {"local_max_density": loc, "fewest_edges": few}
            for x, (loc, few) in prof.per_vertex.items()
        },
        "critical_edge_count": prof.critical_edge_count,
        "balance": prof.balance,
        "automorphism_count": prof.automorphism_count,
    }
    _emit(report, cfg)


def _cmd_count(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    if cfg.host_path:
        g = _load_host(cfg)
        source = {"host": cfg.host_path}
    elif cfg.n is not None and cfg.p is not None:
        g = host.sample_gnp(p.k, cfg.n, cfg.p, cfg.seed)
        source = {"model": "gnp", "n": cfg.n, "p": cfg.p, "seed": cfg.seed}
    elif cfg.n is not None and cfg.m_edges is not None:
        g = host.sample_gnm(p.k, cfg.n, cfg.m_edges, cfg.seed)
        source = {"model": "gnm", "n": cfg.n, "M": cfg.m_edges, "seed": cfg.seed}
    elif cfg.n is not None:
        counts = factor.complete_graph_count(p, cfg.n)
        _emit({"source": {"model": "complete", "n": cfg.n},
               "labeled": counts.labeled, "unlabeled": counts.unlabeled}, cfg)
        return
    else:
        raise InputError("count needs --host, or --n with optional --p/--M")
    counts = factor.count_factors(p, g)
    _emit({"source": source, "labeled": counts.labeled, "unlabeled": counts.unlabeled}, cfg)


def _cmd_scan(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    n_list = cfg.n_list if cfg.n_list else ((cfg.n,) if cfg.n else None)
    if not n_list:
        raise InputError("scan needs --n-list or --n")
    estimates = thresholds.threshold_scan(
        p, list(n_list), cfg.trials, target=cfg.target, seed=cfg.seed,
        property_name=cfg.property_name, workers=cfg.workers,
    )
    header = ["n", "p_half", "ci_low", "ci_high", "formula_value", "ratio",
              "trials", "seed", "property"]
    rows = [
        [e.n, _fmt_float(e.p_half), _fmt_float(e.ci_low), _fmt_float(e.ci_high),
         _fmt_float(e.formula_value), _fmt_float(e.ratio), e.trials_per_probe,
         e.seed, e.property_name]
        for e in estimates
    ]
    _emit(estimates, cfg, csv_rows=rows, csv_header=header)


def _cmd_trace(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    trace = process.run_process(
        p, _need(cfg, "n"), cfg.seed, t_max=cfg.t_max,
        b_level=cfg.b_level, reg_eps=cfg.eps,
    )
    header = ["i", "edge", "xi_num", "xi_den", "gamma_num", "gamma_den", "z",
              "x_partial", "log_factor_count", "margin", "guard_state"]
    rows = [
        [s.i, "-".join(map(str, s.edge)), s.xi.numerator, s.xi.denominator,
         s.gamma.numerator, s.gamma.denominator,
         f"{s.z.numerator}/{s.z.denominator}",
         f"{s.x_partial.numerator}/{s.x_partial.denominator}",
         _fmt_float(s.log_factor_count), _fmt_float(s.margin),
         "ok" if s.guard_ok else "tripped"]
        for s in trace.steps
    ]
    _emit(trace, cfg, csv_rows=rows, csv_header=header)


def _battery_hosts(p, cfg: RunConfig):
    """Random hosts with at least one factor, resampled up to a fixed budget."""
    from .rng import derive_seed

    n = _need(cfg, "n")
    prob = cfg.p if cfg.p is not None else 0.7
    hosts = []
    attempt = 0
    while len(hosts) < cfg.trials and attempt < 200 * cfg.trials:
        g = host.sample_gnp(p.k, n, prob, derive_seed(cfg.seed, attempt))
        attempt += 1
        if factor.has_factor(p, g):
            hosts.append(g)
    if len(hosts) < cfg.trials:
        raise InputError(
            f"could not find {cfg.trials} hosts with factors at n={n}, p={prob}"
        )
    return hosts


def _cmd_martingale_check(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    rows = []
    for g in _battery_hosts(p, cfg):
        left, right = process.verify_martingale_step(p, g)
        if left != right:
            raise InvariantError(f"conditional-mean identity failed: {left} != {right}")
        rows.append({"edges": g.m, "average": left, "expected": right, "equal": True})
    _emit({"n": cfg.n, "trials": len(rows), "all_equal": True, "cases": rows}, cfg)


def _cmd_shearer(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    rows = []
    for g in _battery_hosts(p, cfg):
        rep = entropy.shearer_check(p, g)
        rows.append({k: rep[k] for k in ("log_factor_count", "entropy_bound", "slack")})
    _emit({"n": cfg.n, "trials": len(rows),
           "min_slack": min(r["slack"] for r in rows), "cases": rows}, cfg)


def _read_weight_csv(path: str) -> list[tuple[tuple[str, ...], float]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].startswith("#"):
                continue
            rows.append((tuple(rec[:-1]), float(rec[-1])))
    if not rows:
        raise InputError(f"no weight rows in {path}")
    return rows


def _cmd_window(cfg: RunConfig) -> None:
    if not cfg.weights_path:
        raise InputError("window needs --weights CSV")
    rows = _read_weight_csv(cfg.weights_path)
    family = entropy.WeightedFamily(
        ids=tuple("-".join(key) for key, _ in rows),
        weights=tuple(w for _, w in rows),
    )
    _emit(entropy.entropy_window(family), cfg)


def _cmd_weight_lemma(cfg: RunConfig) -> None:
    if not cfg.weights_path:
        raise InputError("weight-lemma needs --weights CSV")
    n, v = _need(cfg, "n"), _need(cfg, "v")
    weights = {}
    for key, w in _read_weight_csv(cfg.weights_path):
        weights[tuple(int(t) for t in key)] = w
    _emit(entropy.weight_lemma_check(n, v, weights, cfg.bound), cfg)


def _poly_from_config(cfg: RunConfig, p) -> polynomial.CopyPolynomial:
    anchor = None
    if cfg.anchor_role is not None or cfg.anchor_vertex is not None:
        if cfg.anchor_role is None or cfg.anchor_vertex is None:
            raise InputError("anchoring needs both --anchor-role and --anchor-vertex")
        anchor = embed.ConstraintSpec(
            ((cfg.anchor_role, cfg.anchor_vertex),), p.edges
        )
    return polynomial.CopyPolynomial(
        pattern=p, n=_need(cfg, "n"), anchor=anchor, collapse=cfg.collapse
    )


def _cmd_poly(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    f = _poly_from_config(cfg, p)
    prob = _need(cfg, "p")
    if cfg.mode == "profile":
        _emit(polynomial.derivative_profile(f, prob), cfg)
    elif cfg.mode == "check":
        _emit(polynomial.hypothesis_check(f, prob, cfg.eps, cfg.theorem), cfg)
    elif cfg.mode == "trial":
        _emit(
            polynomial.concentration_trial(
                f, prob, cfg.trials, cfg.eps, cfg.seed, workers=cfg.workers
            ),
            cfg,
        )
    else:
        raise InputError(f"unknown poly mode {cfg.mode!r}")


def _cmd_models(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    _emit(
        host.compare_models(
            p, _need(cfg, "n"), _need(cfg, "p"), cfg.trials, cfg.seed,
            sweep=cfg.sweep, workers=cfg.workers,
        ),
        cfg,
    )


def _cmd_regularity(cfg: RunConfig) -> None:
    p = _load_pattern(cfg)
    if cfg.host_path:
        g = _load_host(cfg)
    else:
        g = host.sample_gnp(p.k, _need(cfg, "n"), _need(cfg, "p"), cfg.seed)
    _emit(
        embed.regularity_report(p, g, _need(cfg, "p"), cfg.eps, cfg.beta, seed=cfg.seed),
        cfg,
    )


_DISPATCH = {
    "analyze": _cmd_analyze,
    "count": _cmd_count,
    "scan": _cmd_scan,
    "trace": _cmd_trace,
    "martingale-check": _cmd_martingale_check,
    "shearer": _cmd_shearer,
    "window": _cmd_window,
    "weight-lemma": _cmd_weight_lemma,
    "poly": _cmd_poly,
    "models": _cmd_models,
    "regularity": _cmd_regularity,
}


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hfactor",
        description="Pattern-factor counting, deletion traces, and threshold experiments.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file whose keys mirror flag names; flags win")
    parser.add_argument("--pattern", dest="pattern_path")
    parser.add_argument("--host", dest="host_path")
    parser.add_argument("--weights", dest="weights_path")
    parser.add_argument("--n", type=int)
    parser.add_argument("--n-list", dest="n_list", help="comma-separated host sizes")
    parser.add_argument("--p", type=float)
    parser.add_argument("--M", dest="m_edges", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--t-max", dest="t_max", type=int)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--B", dest="bound", type=float)
    parser.add_argument("--v", type=int)
    parser.add_argument("--target", type=float)
    parser.add_argument("--property", dest="property_name", choices=["factor", "coverage", "role"])
    parser.add_argument("--mode", choices=["profile", "check", "trial"])
    parser.add_argument("--theorem", choices=list(polynomial.THEOREMS))
    parser.add_argument("--collapse", action="store_true", default=None)
    parser.add_argument("--anchor-role", dest="anchor_role", type=int)
    parser.add_argument("--anchor-vertex", dest="anchor_vertex", type=int)
    parser.add_argument("--b-level", dest="b_level", type=float)
    parser.add_argument("--sweep", action="store_true", default=None)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", dest="out_path")
    parser.add_argument("--format", choices=["csv", "json"])
    return parser


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    file_values = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise InputError("config file must hold a JSON object")
        alias = {"pattern": "pattern_path", "host": "host_path",
                 "weights": "weights_path", "M": "m_edges",
                 "property": "property_name", "B": "bound", "out": "out_path"}
        for key, value in raw.items():
            field = alias.get(key, key.replace("-", "_"))
            file_values[field] = value
    cfg = RunConfig(command=args.command)
    if "n_list" in file_values and isinstance(file_values["n_list"], list):
        file_values["n_list"] = tuple(int(x) for x in file_values["n_list"])
    for field, value in file_values.items():
        if not hasattr(cfg, field):
            raise InputError(f"unknown config key {field!r}")
        setattr(cfg, field, value)
    for field in vars(cfg):
        if field == "command":
            continue
        flag_value = getattr(args, field, None)
        if flag_value is not None:
            setattr(cfg, field, flag_value)
    if isinstance(cfg.n_list, str):
        cfg.n_list = tuple(int(tok) for tok in cfg.n_list.split(",") if tok.strip())
    if args.workers is None and "workers" not in file_values:
        cfg.workers = max(1, os.cpu_count() or 1)
    if cfg.workers < 1:
        raise InputError("workers must be at least 1")
    if cfg.command not in _DISPATCH:
        raise InputError(f"unknown command {cfg.command!r}")
    return cfg


def run(cfg: RunConfig) -> int:
    _DISPATCH[cfg.command](cfg)
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
