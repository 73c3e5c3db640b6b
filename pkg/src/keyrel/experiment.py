"""Monte Carlo engine: repeated trials, sweeps and confidence intervals.

Trial ``k`` of any run draws from stream ``k`` of the run's seed, so results
are identical whether trials run serially or across worker processes. Every
point of a sweep reuses streams ``0..trials-1`` (common random numbers), so a
single-point sweep reproduces :func:`run_trials` exactly.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from . import analytic
from .analytic import Unachievable
from .graphalgo import TrialOutcome, components
from .model import ModelParams, ScalingConfig
from .sampler import sample_graph, trial_rng

Z95 = NormalDist().inv_cdf(0.975)


def estimate_ci(successes: int, trials: int, z: float = Z95) -> tuple[float, tuple[float, float]]:
    """Point estimate and Wilson score interval (95% by default)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return p, (max(0.0, centre - half), min(1.0, centre + half))


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _run_streams(params: ModelParams, seed: int, start: int, stop: int) -> list[TrialOutcome]:
    return [components(sample_graph(params, trial_rng(seed, k))) for k in range(start, stop)]


@dataclass
class TrialCounts:
    trials: int
    no_isolated: int
    connected: int
    isolated_sum: int
    isolated_sq_sum: int
    connected_with_isolated: int = 0   # must stay 0: connected implies no isolated node
    outcomes: list[TrialOutcome] | None = None

    @classmethod
    def tally(cls, outcomes: list[TrialOutcome], keep: bool = False) -> "TrialCounts":
        iso = [o.isolated_count for o in outcomes]
        return cls(
            trials=len(outcomes),
            no_isolated=sum(1 for i in iso if i == 0),
            connected=sum(1 for o in outcomes if o.connected),
            isolated_sum=sum(iso),
            isolated_sq_sum=sum(i * i for i in iso),
            connected_with_isolated=sum(1 for o in outcomes
                                        if o.connected and o.isolated_count > 0),
            outcomes=outcomes if keep else None,
        )

    @property
    def isolated_mean(self) -> float:
        return self.isolated_sum / self.trials

    @property
    def isolated_sem(self) -> float:
        """Standard error of the mean isolated count."""
        t = self.trials
        if t < 2:
            return math.nan
        var = (self.isolated_sq_sum - self.isolated_sum ** 2 / t) / (t - 1)
        return math.sqrt(max(var, 0.0) / t)


def _run_many(grid: Sequence[ModelParams], trials: int, seed: int, jobs: int,
              keep_outcomes: bool = False) -> list[TrialCounts]:
    # one pool for the whole grid; each point's streams are split into chunks
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = max(1, jobs)
    if jobs == 1 or not grid:
        return [TrialCounts.tally(_run_streams(p, seed, 0, trials), keep_outcomes)
                for p in grid]
    chunks = max(1, min(jobs, trials))
    bounds = np.linspace(0, trials, chunks + 1).astype(int)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [[pool.submit(_run_streams, p, seed, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:])] for p in grid]
        return [TrialCounts.tally([o for f in fs for o in f.result()], keep_outcomes)
                for fs in futures]


def run_trials(params: ModelParams, trials: int, seed: int, jobs: int = 1,
               keep_outcomes: bool = False) -> TrialCounts:
    """Sample ``trials`` independent graphs and tally isolation / connectivity."""
    params.check()
    return _run_many([params], trials, seed, jobs, keep_outcomes)[0]


@dataclass(frozen=True)
class SweepPoint:
    value: float
    params: ModelParams
    trials: int
    count_no_isolated: int
    count_connected: int
    p_no_isolated: float
    p_connected: float
    ci_no_isolated: tuple[float, float]
    ci_connected: tuple[float, float]
    isolated_mean: float
    connected_with_isolated: int
    lambda1: float
    Lambda1: float
    c_n: float
    critical_flag: bool


@dataclass
class SweepResult:
    swept_param: str
    points: list[SweepPoint] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def values(self) -> list[float]:
        return [pt.value for pt in self.points]

    @property
    def p_connected(self) -> list[float]:
        return [pt.p_connected for pt in self.points]

    @property
    def p_no_isolated(self) -> list[float]:
        return [pt.p_no_isolated for pt in self.points]


def _point(value, params: ModelParams, counts: TrialCounts) -> SweepPoint:
    trials = counts.trials
    p_iso, ci_iso = estimate_ci(counts.no_isolated, trials)
    p_con, ci_con = estimate_ci(counts.connected, trials)
    lam1 = analytic.mean_edge_prob(params, 0)
    return SweepPoint(
        value=value, params=params, trials=trials,
        count_no_isolated=counts.no_isolated, count_connected=counts.connected,
        p_no_isolated=p_iso, p_connected=p_con,
        ci_no_isolated=ci_iso, ci_connected=ci_con,
        isolated_mean=counts.isolated_mean,
        connected_with_isolated=counts.connected_with_isolated,
        lambda1=lam1,
        Lambda1=params.alpha * lam1,
        c_n=analytic.scaling_coefficient(params),
        critical_flag=analytic.meets_critical(lam1, params.n, params.alpha),
    )


def sweep_k1(n: int, mu: Sequence[float], offsets: Sequence[int], pool: int,
             alphas: Iterable[float], k1_values: Iterable[int], trials: int = 200,
             seed: int = 0, jobs: int = 1) -> list[SweepResult]:
    """One curve per ``alpha`` over smallest ring sizes ``K = K1 + offsets``."""
    k1_values = list(k1_values)
    alphas = list(alphas)
    grids = [[ModelParams(n, tuple(mu), tuple(k + o for o in offsets), pool, a).check()
              for k in k1_values] for a in alphas]
    t0 = time.perf_counter()
    counts = _run_many([p for g in grids for p in g], trials, seed, jobs)
    wall = time.perf_counter() - t0

    out = []
    for j, (alpha, grid) in enumerate(zip(alphas, grids)):
        res = SweepResult("K1")
        for i, (k1, params) in enumerate(zip(k1_values, grid)):
            res.points.append(_point(k1, params, counts[j * len(k1_values) + i]))
        try:
            crit = analytic.critical_k1(n, mu, offsets, pool, alpha)
        except Unachievable:
            crit = None
        res.meta.update(alpha=alpha, critical_k1=crit, seed=seed, wall_time=wall)
        out.append(res)
    return out


def sweep_alpha(n: int, mu: Sequence[float], profiles: Iterable[Sequence[int]], pool: int,
                alphas: Iterable[float], trials: int = 200, seed: int = 0,
                jobs: int = 1) -> list[SweepResult]:
    """One curve per key-ring profile over the link survival probability."""
    alphas = list(alphas)
    profiles = [tuple(k) for k in profiles]
    grids = [[ModelParams(n, tuple(mu), keys, pool, a).check() for a in alphas]
             for keys in profiles]
    t0 = time.perf_counter()
    counts = _run_many([p for g in grids for p in g], trials, seed, jobs)
    wall = time.perf_counter() - t0

    out = []
    for j, (keys, grid) in enumerate(zip(profiles, grids)):
        res = SweepResult("alpha")
        for i, (a, params) in enumerate(zip(alphas, grid)):
            res.points.append(_point(a, params, counts[j * len(alphas) + i]))
        crit = analytic.critical_alpha(ModelParams(n, tuple(mu), keys, pool))
        res.meta.update(keys=keys, critical_alpha=crit.alpha,
                        critical_alpha_achievable=crit.achievable, seed=seed,
                        wall_time=wall)
        out.append(res)
    return out


def scaling_sweep(cfg: ScalingConfig, trials: int = 200, seed: int = 0,
                  jobs: int = 1) -> SweepResult:
    """Empirical probabilities over ``n`` with ``alpha_n`` tuned so ``c_n = c``.

    Grid points whose required ``alpha_n`` exceeds 1 are skipped and listed in
    ``meta["skipped"]``; if every point is skipped, ``Unachievable`` is raised.
    """
    cfg.check()
    grid, skipped = [], []
    for n in cfg.n_values:
        base = cfg.params_at(n)
        alpha = analytic.alpha_for_scaling(base, cfg.c)
        if alpha > 1:
            skipped.append((n, alpha))
        else:
            grid.append(base.with_(alpha=alpha))
    if not grid:
        raise Unachievable(f"alpha_n exceeds 1 at every n for c={cfg.c}")
    t0 = time.perf_counter()
    counts = _run_many(grid, trials, seed, jobs)
    res = SweepResult("n", [_point(p.n, p, c) for p, c in zip(grid, counts)])
    res.meta.update(c=cfg.c, skipped=skipped, seed=seed,
                    wall_time=time.perf_counter() - t0)
    return res


def empirical_crossing(xs: Sequence[float], ps: Sequence[float], level: float = 0.5) -> float | None:
    """First ``x`` where ``ps`` reaches ``level``, linearly interpolated.

    Returns ``None`` if the curve never gets there.
    """
    for i, (x, p) in enumerate(zip(xs, ps)):
        if p >= level:
            if i == 0 or p == ps[i - 1]:
                return float(x)
            x0, p0 = xs[i - 1], ps[i - 1]
            return float(x0 + (level - p0) * (x - x0) / (p - p0))
    return None


# -- CSV output -----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def csv_header(r: int) -> list[str]:
    return (["sweep_param", "sweep_value", "alpha"]
            + [f"K{i + 1}" for i in range(r)]
            + ["P", "n", "trials", "count_no_isolated", "count_connected",
               "p_no_isolated", "p_connected", "ci_lo_conn", "ci_hi_conn",
               "lambda1", "Lambda1", "c_n", "critical_flag"])


def csv_rows(result: SweepResult) -> list[list[str]]:
    rows = []
    for pt in result.points:
        p = pt.params
        rows.append([result.swept_param, _fmt(pt.value), _fmt(float(p.alpha))]
                    + [_fmt(k) for k in p.keys]
                    + [_fmt(p.pool), _fmt(p.n), _fmt(pt.trials),
                       _fmt(pt.count_no_isolated), _fmt(pt.count_connected),
                       _fmt(pt.p_no_isolated), _fmt(pt.p_connected),
                       _fmt(pt.ci_connected[0]), _fmt(pt.ci_connected[1]),
                       _fmt(pt.lambda1), _fmt(pt.Lambda1), _fmt(pt.c_n),
                       _fmt(pt.critical_flag)])
    return rows


def write_csv(results: Sequence[SweepResult], fh, comments: dict | None = None,
              r: int | None = None) -> None:
    """Write sweep results in grid order, preceded by ``# key = value`` lines."""
    for key, value in (comments or {}).items():
        fh.write(f"# {key} = {value}\n")
    if r is None:
        r = next((pt.params.r for res in results for pt in res.points), 0)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(csv_header(r))
    for res in results:
        writer.writerows(csv_rows(res))
