"""Closed-form edge probabilities and finite-n threshold solvers.

Class indices are 0-based throughout (class 0 holds the smallest rings).
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import ModelParams, ScalingConfig


class Unachievable(ValueError):
    """No parameter value in the admissible range meets the threshold."""


def _check_rings(P: int, Ki: int, Kj: int) -> None:
    if P < 1:
        raise ValueError(f"pool size must be >= 1 (got {P})")
    for k in (Ki, Kj):
        if not 1 <= k <= P:
            raise ValueError(f"ring size {k} outside [1, {P}]")


def edge_prob(P: int, Ki: int, Kj: int) -> float:
    """Probability that random rings of sizes ``Ki`` and ``Kj`` share a key.

    Equals ``1 - C(P-Ki, Kj) / C(P, Kj)``, or exactly 1 when ``Ki + Kj > P``.
    The binomial ratio is accumulated as a sum of ``log1p`` terms, which keeps
    full relative precision even when the probability is tiny.
    """
    _check_rings(P, Ki, Kj)
    a, b = (Ki, Kj) if Ki <= Kj else (Kj, Ki)
    if a + b > P:
        return 1.0
    # C(P-b, a) / C(P, a) = prod_{t<a} (1 - b/(P-t))
    log_ratio = math.fsum(math.log1p(-b / (P - t)) for t in range(a))
    return -math.expm1(log_ratio)


def edge_prob_lgamma(P: int, Ki: int, Kj: int) -> float:
    """Same quantity as :func:`edge_prob`, via log-gamma differences.

    Kept as an independent numerical route; loses relative accuracy for very
    small probabilities because of cancellation between large lgamma values.
    """
    _check_rings(P, Ki, Kj)
    if Ki + Kj > P:
        return 1.0
    lg = math.lgamma
    log_ratio = (lg(P - Ki + 1) - lg(P - Ki - Kj + 1)) - (lg(P + 1) - lg(P - Kj + 1))
    return -math.expm1(log_ratio)


def edge_prob_matrix(keys: Sequence[int], P: int) -> np.ndarray:
    """Pairwise class edge probabilities, bit-for-bit symmetric."""
    r = len(keys)
    out = np.empty((r, r))
    for i in range(r):
        for j in range(i, r):
            out[i, j] = out[j, i] = edge_prob(P, keys[i], keys[j])
    return out


def _lambdas(mu: Sequence[float], p: np.ndarray) -> np.ndarray:
    # fsum is correctly rounded, so rows that dominate elementwise stay ordered
    return np.array([math.fsum(m * pij for m, pij in zip(mu, row)) for row in p])


def mean_edge_probs(params: ModelParams) -> np.ndarray:
    """Vector of ``lambda_i = sum_j mu_j p_ij`` over all classes."""
    return _lambdas(params.mu, edge_prob_matrix(params.keys, params.pool))


def mean_edge_prob(params: ModelParams, i: int) -> float:
    if not 0 <= i < params.r:
        raise IndexError(f"class index {i} out of range for r={params.r}")
    p = [edge_prob(params.pool, params.keys[i], k) for k in params.keys]
    return math.fsum(m * pij for m, pij in zip(params.mu, p))


def thinned_mean_edge_prob(params: ModelParams, i: int) -> float:
    return params.alpha * mean_edge_prob(params, i)


def scaling_coefficient(params: ModelParams) -> float:
    """``c_n = Lambda_1 * n / log n`` for the class with the smallest rings."""
    n = params.n
    if n < 2:
        raise ValueError(f"scaling coefficient needs n >= 2 (got {n})")
    return thinned_mean_edge_prob(params, 0) * n / math.log(n)


def connectivity_threshold(n: int, alpha: float) -> float:
    """Right-hand side ``(1/alpha) * log n / n`` of the critical condition."""
    return (1.0 / alpha) * (math.log(n) / n)


def meets_critical(lambda1: float, n: int, alpha: float) -> bool:
    # strict: equality does not count
    return lambda1 > connectivity_threshold(n, alpha)


def critical_k1(n: int, mu: Sequence[float], offsets: Sequence[int], P: int,
                alpha: float) -> int:
    """Smallest ``K1`` with ``lambda_1 > (1/alpha) log n / n``.

    Rings are ``K_j = K1 + offsets[j]`` (``offsets[0] == 0``). Scans upward
    from ``K1 = 1``; ``lambda_1`` must not decrease along the way.
    """
    offsets = tuple(offsets)
    if not offsets or offsets[0] != 0:
        raise ValueError("offsets must start with 0")
    if any(a > b for a, b in zip(offsets, offsets[1:])):
        raise ValueError("offsets must be ascending")
    if len(offsets) != len(mu):
        raise ValueError("offsets and mu differ in length")
    prev = -1.0
    for k1 in range(1, P - offsets[-1] + 1):
        params = ModelParams(n, tuple(mu), tuple(k1 + o for o in offsets), P, alpha)
        lam1 = mean_edge_prob(params, 0)
        if lam1 < prev:
            raise ArithmeticError(f"lambda_1 decreased at K1={k1}")
        if meets_critical(lam1, n, alpha):
            return k1
        prev = lam1
    raise Unachievable(f"no K1 <= {P - offsets[-1]} satisfies the critical condition")


class CriticalAlpha(NamedTuple):
    alpha: float
    achievable: bool


def critical_alpha(params: ModelParams) -> CriticalAlpha:
    """Infimum of ``alpha`` meeting the critical condition; ``params.alpha`` is ignored.

    ``achievable`` is False when even ``alpha = 1`` fails (ratio >= 1).
    """
    lam1 = mean_edge_prob(params, 0)
    if lam1 <= 0:
        raise ValueError("lambda_1 is zero")
    ratio = (math.log(params.n) / params.n) / lam1
    return CriticalAlpha(min(1.0, ratio), ratio < 1.0)


class Lambda1Approx(NamedTuple):
    approx: float
    exact: float
    rel_gap: float


def approx_lambda1(params: ModelParams) -> Lambda1Approx:
    """``K1 * K_avg / P`` and its relative distance to the exact ``lambda_1``.

    Only meaningful while ``lambda_1`` is small.
    """
    k_avg = math.fsum(m * k for m, k in zip(params.mu, params.keys))
    approx = params.keys[0] * k_avg / params.pool
    exact = mean_edge_prob(params, 0)
    return Lambda1Approx(approx, exact, abs(approx - exact) / exact)


@dataclass(frozen=True)
class AnalyticSummary:
    p: np.ndarray
    lambda_: np.ndarray
    Lambda: np.ndarray
    c_n: float
    k_avg: float
    lambda1_approx: float

    @classmethod
    def of(cls, params: ModelParams) -> "AnalyticSummary":
        p = edge_prob_matrix(params.keys, params.pool)
        lam = _lambdas(params.mu, p)
        Lam = params.alpha * lam
        c_n = Lam[0] * params.n / math.log(params.n) if params.n >= 2 else math.nan
        k_avg = math.fsum(m * k for m, k in zip(params.mu, params.keys))
        return cls(p, lam, Lam, float(c_n), k_avg, params.keys[0] * k_avg / params.pool)


def expected_isolated(params: ModelParams) -> float:
    """Mean number of isolated nodes, ``n * sum_i mu_i (1 - Lambda_i)^(n-1)``."""
    Lam = params.alpha * mean_edge_probs(params)
    return params.n * math.fsum(m * (1.0 - L) ** (params.n - 1)
                                for m, L in zip(params.mu, Lam))


# -- zero-one law scaling -----------------------------------------------------

def alpha_for_scaling(params: ModelParams, c: float) -> float:
    """Unclipped ``alpha`` putting ``Lambda_1`` exactly at ``c log n / n``."""
    return c * math.log(params.n) / (params.n * mean_edge_prob(params, 0))


TREND_RTOL = 1e-9


def classify_trend(values: Sequence[float], rtol: float = TREND_RTOL) -> str:
    """Label a sequence as growing, shrinking, flat or mixed."""
    vals = [float(v) for v in values]
    if len(vals) < 2:
        return "flat"
    steps = []
    for a, b in zip(vals, vals[1:]):
        scale = max(abs(a), abs(b), 1e-300)
        d = (b - a) / scale
        steps.append(0 if abs(d) <= rtol else (1 if d > 0 else -1))
    if all(s == 0 for s in steps):
        return "flat"
    if all(s > 0 for s in steps):
        return "growing"
    if all(s < 0 for s in steps):
        return "shrinking"
    return "mixed"


@dataclass(frozen=True)
class DiagnosticsReport:
    n: int
    pool: int
    pool_condition: bool | None   # P_n >= sigma*n; None if no sigma configured
    alpha: float                  # solved from c, unclipped
    n_alpha_p11: float
    grid_n_alpha_p11: tuple[float, ...]
    trend: str
    flagged: bool                 # trend does not look like it diverges


def asymptotic_diagnostics(cfg: ScalingConfig, n: int) -> DiagnosticsReport:
    """Finite-n view of the side conditions of the connectivity one-law.

    Reports whether ``P_n >= sigma n`` holds at ``n`` and how ``n alpha_n p_11``
    evolves over the grid. No verdict is given on the asymptotic conditions.
    """
    def at(m):
        params = cfg.params_at(m)
        a = alpha_for_scaling(params, cfg.c)
        p11 = edge_prob(params.pool, params.keys[0], params.keys[0])
        return params.pool, a, m * a * p11

    pool, alpha, value = at(n)
    grid = tuple(at(m)[2] for m in cfg.n_values)
    trend = classify_trend(grid)
    pool_ok = None if cfg.sigma is None else pool >= cfg.sigma * n
    return DiagnosticsReport(n, pool, pool_ok, alpha, value, grid, trend,
                             trend != "growing")
