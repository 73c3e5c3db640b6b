"""Command-line front end.

Exit codes: 0 success, 2 invalid parameters or grid, 3 I/O failure.
Values come from (highest precedence first) flags, a ``--config`` file of
``key = value`` lines, then built-in defaults.
"""

from __future__ import annotations

import argparse
import math
import os
import secrets
import sys
import tempfile
from pathlib import Path

from . import analytic, experiment
from .graphalgo import components
from .model import (InvalidParams, ModelParams, ScalingConfig, parse_floats,
                    parse_ints, read_config, soft_warnings)
from .sampler import sample_graph, trial_rng, write_edgelist

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3

DEFAULTS = {
    "analyze": {"alpha": "1.0"},
    "sample": {"alpha": "1.0"},
    "sweep-k1": {"trials": "200", "offsets": "0", "alphas": "0.2,0.4,0.6,0.8"},
    "sweep-alpha": {"trials": "200", "alphas": "0.05:1.0:0.05"},
    "scaling-check": {"trials": "200"},
}


class UsageError(ValueError):
    pass


class OutputError(OSError):
    pass


# -- value parsing ----------------------------------------------------------------

def parse_int_grid(s: str) -> list[int]:
    """``lo:hi`` (inclusive) or a comma list."""
    if ":" in s:
        parts = s.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"bad integer range {s!r}")
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        if step < 1:
            raise UsageError(f"range step must be positive in {s!r}")
        return list(range(lo, hi + 1, step))
    return list(parse_ints(s))


def parse_float_grid(s: str) -> list[float]:
    """``lo:hi:step`` (inclusive of ``hi`` up to rounding) or a comma list."""
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise UsageError(f"float range needs lo:hi:step, got {s!r}")
        lo, hi, step = map(float, parts)
        if step <= 0:
            raise UsageError(f"range step must be positive in {s!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(max(count, 0))]
    return list(parse_floats(s))


def parse_profiles(s: str) -> list[tuple[int, ...]]:
    return [tuple(int(k) for k in prof.split(":")) for prof in s.split(",") if prof.strip()]


def parse_pool_rule(s: str) -> tuple[int | None, float | None]:
    kind, _, value = s.partition(":")
    if kind == "sigma":
        return None, float(value)
    if kind == "fixed":
        return int(float(value)), None
    raise UsageError(f"pool rule must be sigma:<x> or fixed:<P>, got {s!r}")


# -- argument handling ------------------------------------------------------------

def _model_flags(p: argparse.ArgumentParser, alpha=True):
    p.add_argument("--n", help="number of nodes")
    p.add_argument("--mu", help="class probabilities, comma separated")
    p.add_argument("--K", help="key ring sizes, comma separated, ascending")
    p.add_argument("--P", help="key pool size")
    if alpha:
        p.add_argument("--alpha", help="link survival probability in (0, 1]")


def _run_flags(p: argparse.ArgumentParser):
    p.add_argument("--trials", help="samples per grid point (default 200)")
    p.add_argument("--seed", help="master seed; drawn from OS entropy if omitted")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: available CPUs; 1 = serial)")
    p.add_argument("--out", help="CSV output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="keyrel", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="file of 'key = value' lines")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="edge probabilities and critical values")
    _model_flags(p)
    p.add_argument("--out", help="optional per-class CSV")

    p = sub.add_parser("sample", help="draw one graph and write its edge list")
    _model_flags(p)
    p.add_argument("--seed")
    p.add_argument("--out", help="edge-list path (default: stdout)")

    p = sub.add_parser("sweep-k1", help="connectivity vs smallest key ring size")
    _model_flags(p, alpha=False)
    p.add_argument("--offsets", help="ring size offsets from K1, starting at 0")
    p.add_argument("--alphas", help="comma list of alpha values")
    p.add_argument("--k1", help="K1 grid, lo:hi or comma list")
    _run_flags(p)

    p = sub.add_parser("sweep-alpha", help="connectivity vs link survival probability")
    _model_flags(p, alpha=False)
    p.add_argument("--profiles", help="key ring profiles, e.g. 10:70,20:60")
    p.add_argument("--alphas", help="alpha grid, lo:hi:step or comma list")
    _run_flags(p)

    p = sub.add_parser("scaling-check", help="zero-one law sweep over n")
    p.add_argument("--c", help="target scaling constant")
    p.add_argument("--n-grid", dest="n_grid", help="increasing list of n values")
    p.add_argument("--K", help="key ring sizes, comma separated")
    p.add_argument("--mu", help="class probabilities (may be omitted when r = 1)")
    p.add_argument("--pool-rule", dest="pool_rule", help="sigma:<x> or fixed:<P>")
    p.add_argument("--sigma", help="sigma for the P_n >= sigma n diagnostic")
    _run_flags(p)

    for p in sub.choices.values():
        p.add_argument("--config", default=argparse.SUPPRESS,
                       help="file of 'key = value' lines")
    return ap


_NOT_CONFIG = {"command", "config", "jobs"}


def resolve(args: argparse.Namespace) -> dict[str, str]:
    """Merge defaults, config file and flags into one string mapping."""
    merged = dict(DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            merged.update(read_config(args.config))
        except OSError as exc:
            raise OutputError(f"cannot read config {args.config}: {exc}") from exc
    for key, value in vars(args).items():
        if key not in _NOT_CONFIG and value is not None:
            merged[key] = str(value)
    return merged


def _require(cfg: dict, *names: str) -> None:
    for name in names:
        if cfg.get(name) in (None, ""):
            flag = "--" + name.replace("_", "-")
            raise UsageError(f"missing required parameter {flag}")


def _model_params(cfg: dict) -> ModelParams:
    _require(cfg, "n", "mu", "K", "P")
    try:
        params = ModelParams(n=int(cfg["n"]), mu=parse_floats(cfg["mu"]),
                             keys=parse_ints(cfg["K"]), pool=int(float(cfg["P"])),
                             alpha=float(cfg.get("alpha", 1.0)))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return params.check()


def _seed(cfg: dict) -> int:
    if cfg.get("seed") is not None:
        return int(cfg["seed"])
    return secrets.randbits(63)


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OutputError(f"cannot write to {path}")


def _atomic_write(path: str | None, write) -> None:
    if path is None:
        write(sys.stdout)
        return
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=target.resolve().parent, prefix=".keyrel-")
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
        os.replace(tmp, target)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _info_stream(out_path):
    # keep stdout clean when it carries the data
    return sys.stdout if out_path else sys.stderr


# -- subcommands ------------------------------------------------------------------

def cmd_analyze(cfg: dict) -> int:
    params = _model_params(cfg)
    _check_writable(cfg.get("out"))
    s = analytic.AnalyticSummary.of(params)
    offsets = [k - params.keys[0] for k in params.keys]
    try:
        k1 = analytic.critical_k1(params.n, params.mu, offsets, params.pool, params.alpha)
    except analytic.Unachievable:
        k1 = None
    crit = analytic.critical_alpha(params)

    out = sys.stdout
    print(f"n={params.n} r={params.r} P={params.pool} alpha={params.alpha:g}", file=out)
    print(f"mu={list(params.mu)} K={list(params.keys)}", file=out)
    for msg in soft_warnings(params):
        print(f"warning: {msg}", file=sys.stderr)
    print("edge probabilities p_ij:", file=out)
    for row in s.p:
        print("  " + " ".join(f"{x:.10g}" for x in row), file=out)
    print("lambda: " + " ".join(f"{x:.10g}" for x in s.lambda_), file=out)
    print("Lambda: " + " ".join(f"{x:.10g}" for x in s.Lambda), file=out)
    print(f"K_avg: {s.k_avg:.10g}", file=out)
    print(f"lambda1 approx K1*K_avg/P: {s.lambda1_approx:.10g}", file=out)
    if params.n >= 2:
        print(f"c_n: {s.c_n:.10g}", file=out)
    print(f"critical K1 (offsets {offsets}): {k1 if k1 is not None else 'unachievable'}",
          file=out)
    print(f"critical alpha: {crit.alpha:.10g}"
          + ("" if crit.achievable else " (unachievable within (0,1])"), file=out)

    if cfg.get("out"):
        def write(fh):
            fh.write("class,mu,K,lambda,Lambda\n")
            for i in range(params.r):
                fh.write(f"{i + 1},{params.mu[i]:.10g},{params.keys[i]},"
                         f"{s.lambda_[i]:.10g},{s.Lambda[i]:.10g}\n")
        _atomic_write(cfg["out"], write)
    return EXIT_OK


def cmd_sample(cfg: dict) -> int:
    params = _model_params(cfg)
    seed = _seed(cfg)
    out_path = cfg.get("out")
    _check_writable(out_path)
    graph = sample_graph(params, trial_rng(seed, 0))
    outcome = components(graph)
    _atomic_write(out_path, lambda fh: write_edgelist(graph, fh))
    info = _info_stream(out_path)
    print(f"seed={seed} edges={len(graph.edges)} isolated={outcome.isolated_count} "
          f"components={outcome.component_count} largest={outcome.largest_component} "
          f"connected={outcome.connected}", file=info)
    return EXIT_OK


def _run_config(cfg: dict) -> tuple[int, int, int]:
    trials = int(cfg["trials"])
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    jobs = cfg.get("_jobs") or experiment.default_jobs()
    return trials, _seed(cfg), jobs


def _emit_sweep(cfg: dict, command: str, results, comments: dict, r: int) -> None:
    header = {"command": command, **comments}
    _atomic_write(cfg.get("out"),
                  lambda fh: experiment.write_csv(results, fh, header, r=r))


def cmd_sweep_k1(cfg: dict) -> int:
    _require(cfg, "n", "mu", "P", "offsets", "alphas", "k1")
    trials, seed, jobs = _run_config(cfg)
    mu = parse_floats(cfg["mu"])
    offsets = parse_ints(cfg["offsets"])
    alphas = parse_float_grid(cfg["alphas"])
    k1s = parse_int_grid(cfg["k1"])
    n, pool = int(cfg["n"]), int(float(cfg["P"]))
    for a in alphas:
        for k in k1s[:1] + k1s[-1:]:
            ModelParams(n, mu, tuple(k + o for o in offsets), pool, a).check()
    _check_writable(cfg.get("out"))

    results = experiment.sweep_k1(n, mu, offsets, pool, alphas, k1s, trials, seed, jobs)
    comments = {"n": n, "mu": cfg["mu"], "P": pool, "offsets": cfg["offsets"],
                "alphas": cfg["alphas"], "k1": cfg["k1"], "trials": trials, "seed": seed}
    _emit_sweep(cfg, "sweep-k1", results, comments, len(offsets))
    info = _info_stream(cfg.get("out"))
    for res in results:
        cross = experiment.empirical_crossing(res.values, res.p_connected)
        print(f"alpha={res.meta['alpha']:g}: critical K1={res.meta['critical_k1']} "
              f"empirical 0.5-crossing={cross}", file=info)
    return EXIT_OK


def cmd_sweep_alpha(cfg: dict) -> int:
    _require(cfg, "n", "mu", "P", "profiles", "alphas")
    trials, seed, jobs = _run_config(cfg)
    mu = parse_floats(cfg["mu"])
    profiles = parse_profiles(cfg["profiles"])
    alphas = parse_float_grid(cfg["alphas"])
    n, pool = int(cfg["n"]), int(float(cfg["P"]))
    if len({len(p) for p in profiles}) > 1:
        raise UsageError("all profiles must have the same number of classes")
    for keys in profiles:
        for a in alphas:
            ModelParams(n, mu, keys, pool, a).check()
    _check_writable(cfg.get("out"))

    results = experiment.sweep_alpha(n, mu, profiles, pool, alphas, trials, seed, jobs)
    comments = {"n": n, "mu": cfg["mu"], "P": pool, "profiles": cfg["profiles"],
                "alphas": cfg["alphas"], "trials": trials, "seed": seed}
    _emit_sweep(cfg, "sweep-alpha", results, comments, len(mu))
    info = _info_stream(cfg.get("out"))
    for res in results:
        cross = experiment.empirical_crossing(res.values, res.p_connected)
        print(f"K={list(res.meta['keys'])}: critical alpha={res.meta['critical_alpha']:.4g} "
              f"empirical 0.5-crossing={cross}", file=info)
    return EXIT_OK


def cmd_scaling_check(cfg: dict) -> int:
    _require(cfg, "c", "n_grid", "K", "pool_rule")
    trials, seed, jobs = _run_config(cfg)
    keys = parse_ints(cfg["K"])
    if cfg.get("mu"):
        mu = parse_floats(cfg["mu"])
    elif len(keys) == 1:
        mu = (1.0,)
    else:
        raise UsageError("missing required parameter --mu")
    pool, sigma = parse_pool_rule(cfg["pool_rule"])
    if cfg.get("sigma") is not None:
        sigma = float(cfg["sigma"])
    scfg = ScalingConfig(c=float(cfg["c"]), n_values=parse_ints(cfg["n_grid"]),
                         mu=mu, keys=keys, pool=pool, sigma=sigma).check()
    _check_writable(cfg.get("out"))

    res = experiment.scaling_sweep(scfg, trials, seed, jobs)
    comments = {"c": scfg.c, "n_grid": cfg["n_grid"], "K": cfg["K"],
                "mu": ",".join(f"{m:g}" for m in mu), "pool_rule": cfg["pool_rule"],
                "trials": trials, "seed": seed}
    if res.meta["skipped"]:
        comments["skipped_n"] = ",".join(str(n) for n, _ in res.meta["skipped"])
    _emit_sweep(cfg, "scaling-check", [res], comments, len(keys))
    info = _info_stream(cfg.get("out"))
    for n, a in res.meta["skipped"]:
        print(f"n={n}: skipped, alpha_n={a:.4g} > 1", file=info)
    diag = analytic.asymptotic_diagnostics(scfg, scfg.n_values[-1])
    for pt in res.points:
        print(f"n={pt.value}: alpha_n={pt.params.alpha:.4g} "
              f"P[no isolated]={pt.p_no_isolated:.3f} P[connected]={pt.p_connected:.3f}",
              file=info)
    print(f"n*alpha_n*p11 over grid: {', '.join(f'{v:.4g}' for v in diag.grid_n_alpha_p11)} "
          f"({diag.trend})", file=info)
    if diag.pool_condition is not None:
        print(f"P_n >= sigma*n at n={diag.n}: {diag.pool_condition}", file=info)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "sample": cmd_sample,
    "sweep-k1": cmd_sweep_k1,
    "sweep-alpha": cmd_sweep_alpha,
    "scaling-check": cmd_scaling_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        cfg["_jobs"] = getattr(args, "jobs", None)
        return COMMANDS[args.command](cfg)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidParams, UsageError, analytic.Unachievable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
