"""Command-line front end.

Usage: ``cluster-radius <subcommand> [flags]`` with subcommands ``bounds``,
``verify-tgi``, ``mayer``, ``stability``, ``decompose`` and ``integrals``.

Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error.
Outputs carry the resolved run configuration as an audit header. The worker
count is left out of it on purpose: results never depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ClusterRadiusError
from .potential import InteractionMatrix, load_potential

SUBCOMMANDS = ("bounds", "verify-tgi", "mayer", "stability", "decompose", "integrals")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    potential: str | None = None
    betas: list[float] = field(default_factory=lambda: [1.0])
    beta_sweep: str | None = None
    n: int | None = None
    seed: int = 0
    trials: int | None = None
    method: str | None = None
    format: str = "json"
    out: str | None = None
    tol: float | None = None

    def audit(self) -> dict:
        return {"version": __version__, **asdict(self)}


# -- argument handling --------------------------------------------------

def parse_sweep(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise UsageError("--beta-sweep expects A:B:N[:log]")
    try:
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad --beta-sweep: {exc}") from exc
    log = len(parts) == 4
    if log and parts[3] != "log":
        raise UsageError("the optional fourth sweep field must be 'log'")
    if steps < 1 or not (a > 0 and b > 0):
        raise UsageError("sweep needs positive endpoints and N >= 1")
    if steps == 1:
        return [a]
    grid = np.geomspace(a, b, steps) if log else np.linspace(a, b, steps)
    return [float(x) for x in grid]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cluster-radius",
                                     description="Mayer-series convergence radius tools")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--potential", metavar="PATH")
        beta = p.add_mutually_exclusive_group()
        beta.add_argument("--beta", type=float)
        beta.add_argument("--beta-sweep", metavar="A:B:N[:log]")
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int)
        p.add_argument("--method")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--workers", type=int)
        p.add_argument("--tol", type=float)
    return parser


def resolve_workers(flag: int | None) -> int:
    env = os.environ.get("CLUSTER_RADIUS_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError("CLUSTER_RADIUS_WORKERS must be an integer") from exc
    if flag is not None:
        if flag < 1:
            raise UsageError("--workers must be >= 1")
        return flag
    return os.cpu_count() or 1


def _pmap(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


# -- serialisation --------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def to_json(config: RunConfig, result) -> str:
    return json.dumps({"config": _clean(config.audit()), "result": _clean(result)},
                      indent=2, sort_keys=True) + "\n"


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def to_csv(config: RunConfig, header: list[str], rows) -> str:
    buf = io.StringIO()
    for key, value in sorted(_clean(config.audit()).items()):
        buf.write(f"# {key}={json.dumps(value, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(config: RunConfig, text: str, path: str | None = None):
    path = path or config.out
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(config: RunConfig):
    if not config.potential:
        raise UsageError(f"{config.subcommand} needs --potential")
    try:
        raw = json.loads(Path(config.potential).read_text())
        p, split = load_potential(config.potential)
    except OSError as exc:
        raise ClusterRadiusError(f"cannot read potential file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ClusterRadiusError(f"potential file is not valid JSON: {exc}") from exc
    return p, split, raw


# -- subcommands ----------------------------------------------------------

def cmd_bounds(config: RunConfig, workers: int):
    from .bounds import compare_report

    p, split, raw = _load(config)
    B = raw.get("stability_constant")
    pid = raw.get("id", p.kind)
    reports = [compare_report(p, beta, split=split, B=B, potential_id=pid) for beta in config.betas]
    if config.format == "json":
        body = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
        return _emit(config, to_json(config, body))
    names = sorted({k for r in reports for k in r.radii})
    header = ["beta"] + [f"{k}_{s}" for k in names for s in ("log", "value")]
    rows = []
    for r in reports:
        row = [r.beta]
        for k in names:
            rad = r.radii.get(k)
            row += [rad.log, rad.value] if rad else [None, None]
        rows.append(row)
    _emit(config, to_csv(config, header, rows))


def _tgi_trial(job):
    from .tgi import lhs_connected_graph_sum, rhs_tree_sum, rhs_tree_sum_mc

    n, seed, trial, tol = job
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, trial])))
    m = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    m[iu] = rng.uniform(-1.0, 2.0, size=len(iu[0]))
    V = InteractionMatrix(m + m.T)
    lhs = lhs_connected_graph_sum(V)
    if n <= 5:
        rhs, se = rhs_tree_sum(V, order=24 if n <= 4 else 16), 0.0
        ok = abs(lhs - rhs) <= max(1e-8, tol * abs(lhs))
    else:
        rhs, se = rhs_tree_sum_mc(V, samples=200_000, seed=seed * 1_000_003 + trial)
        ok = abs(lhs - rhs) <= 4.0 * se + max(1e-8, tol * abs(lhs))
    return trial, lhs, rhs, se, abs(lhs - rhs), ok


def cmd_verify_tgi(config: RunConfig, workers: int):
    n = config.n if config.n is not None else 3
    if not 2 <= n <= 6:
        raise ClusterRadiusError("verify-tgi supports 2 <= n <= 6")
    trials = config.trials if config.trials is not None else 100
    tol = config.tol if config.tol is not None else 1e-6
    rows = _pmap(_tgi_trial, [(n, config.seed, t, tol) for t in range(trials)], workers)
    passes = sum(1 for r in rows if r[-1])
    if config.format == "json":
        body = {"n": n, "trials": trials, "passes": passes, "tolerance": tol,
                "rows": [dict(zip(("trial", "lhs", "rhs", "std_error", "abs_error", "pass"), r))
                         for r in rows]}
        _emit(config, to_json(config, body))
    else:
        _emit(config, to_csv(config, ["trial", "lhs", "rhs", "std_error", "abs_error", "pass"], rows))
    if passes != trials:
        raise ClusterRadiusError(f"identity failed on {trials - passes} of {trials} trials")


def cmd_mayer(config: RunConfig, workers: int):
    from .mayer import Box, default_box_side, mayer_coefficient

    p, _, raw = _load(config)
    n = config.n if config.n is not None else 3
    method = (config.method or ("exact1d" if p.dimension == 1 else "montecarlo")).lower()
    samples = config.trials if config.trials is not None else 1_000_000
    rows = []
    for beta in config.betas:
        side = float(raw.get("box_side", default_box_side(p, beta, n, method)))
        est = mayer_coefficient(p, beta, Box(p.dimension, side), n, method=method, seed=config.seed,
                                samples=samples, workers=workers)
        rows.append({"beta": beta, **est.to_row(), "boundary_flag": est.boundary_flag})
    if config.format == "json":
        return _emit(config, to_json(config, rows[0] if len(rows) == 1 else rows))
    header = ["n", "value", "std_error", "method", "box_side", "samples", "beta", "boundary_flag"]
    _emit(config, to_csv(config, header, [[r[k] for k in header] for r in rows]))


def _stability_job(job):
    from .stability import configuration_lower_bound

    p, N, seed, restarts = job
    est = configuration_lower_bound(p, restarts=restarts, seed=seed, n_values=[N])
    return N, est.lower_bound, est.witness


def cmd_stability(config: RunConfig, workers: int):
    p, _, _ = _load(config)
    n_max = config.n if config.n is not None else 12
    if n_max < 2:
        raise ClusterRadiusError("--n must be >= 2")
    restarts = config.trials if config.trials is not None else 4
    rows = _pmap(_stability_job, [(p, N, config.seed, restarts) for N in range(2, n_max + 1)], workers)
    best = max(rows, key=lambda r: r[1])
    if config.format == "json":
        body = {"lower_bound": best[1], "attained_at_N": best[0], "n_max": n_max,
                "restarts": restarts, "seed": config.seed,
                "per_N": [{"N": r[0], "lower_bound": r[1]} for r in rows],
                "witness": [list(x) for x in best[2]],
                "note": "local-search lower bound on B, not a certified value"}
        return _emit(config, to_json(config, body))
    _emit(config, to_csv(config, ["N", "lower_bound"], [[r[0], r[1]] for r in rows]))


def cmd_decompose(config: RunConfig, workers: int):
    from .decompose import decompose

    p, _, raw = _load(config)
    res = decompose(p, stability_constant=raw.get("stability_constant"))
    body = res.to_dict()
    if config.format == "json":
        _emit(config, to_json(config, body))
    else:
        header, rows = res.r_table()
        _emit(config, to_csv(config, header, rows))
    if config.out:
        stem = Path(config.out)
        for suffix, (header, rows) in (("_r.csv", res.r_table()), ("_p.csv", res.p_table())):
            path = stem.with_name(stem.stem + suffix)
            _emit(config, to_csv(config, header, rows), str(path))


def cmd_integrals(config: RunConfig, workers: int):
    from .quad import QuadratureSpec, integral_constants

    p, split, _ = _load(config)
    spec = QuadratureSpec(rel_tol=config.tol) if config.tol is not None else QuadratureSpec()
    rows = []
    for beta in config.betas:
        ic = integral_constants(p, beta, spec, split)
        rows.append({"beta": beta, **ic.to_dict()})
    if config.format == "json":
        return _emit(config, to_json(config, rows[0] if len(rows) == 1 else rows))
    header = list(rows[0])
    _emit(config, to_csv(config, header, [[r[k] for k in header] for r in rows]))


COMMANDS = {"bounds": cmd_bounds, "verify-tgi": cmd_verify_tgi, "mayer": cmd_mayer,
            "stability": cmd_stability, "decompose": cmd_decompose, "integrals": cmd_integrals}


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        betas = parse_sweep(args.beta_sweep) if args.beta_sweep else [args.beta if args.beta is not None else 1.0]
        if any(not b > 0 for b in betas):
            raise UsageError("beta must be positive")
        workers = resolve_workers(args.workers)
        config = RunConfig(args.subcommand, args.potential, betas, args.beta_sweep, args.n, args.seed,
                           args.trials, args.method, args.format, args.out, args.tol)
        COMMANDS[args.subcommand](config, workers)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _error("UsageError", str(exc))
        return 2
    except (ClusterRadiusError, ValueError, OSError) as exc:
        _error(type(exc).__name__, str(exc))
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
