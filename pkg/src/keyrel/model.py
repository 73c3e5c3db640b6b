"""Parameters of the heterogeneous key predistribution ensemble.

A network is described by ``ModelParams(n, mu, keys, pool, alpha)``: ``n``
sensors, each placed in class ``i`` with probability ``mu[i]`` and handed
``keys[i]`` distinct keys drawn from a pool of ``pool`` keys. Every edge of
the resulting key graph then survives independently with probability
``alpha``.

Construction never raises; call :func:`validate` (or ``params.check()``) to
find out whether a parameter set is usable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

MU_TOL = 1e-12


class InvalidParams(ValueError):
    """Raised when a parameter set fails validation."""

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ModelParams:
    n: int
    mu: tuple[float, ...]
    keys: tuple[int, ...]
    pool: int
    alpha: float = 1.0

    def __post_init__(self):
        # normalise sequences so instances hash and compare by value
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "keys", tuple(self.keys))

    @property
    def r(self) -> int:
        return len(self.keys)

    def check(self) -> "ModelParams":
        problems = validate(self)
        if problems:
            raise InvalidParams(problems)
        return self

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate(params: ModelParams) -> list[str]:
    """Return one diagnostic string per violated hard invariant.

    An empty list means the parameters are usable everywhere in the package.
    The theorems additionally want ``K_r <= P/2``; that is reported by
    :func:`soft_warnings` instead, since sampling works fine without it.
    """
    out = []
    n, mu, keys, pool, alpha = (params.n, params.mu, params.keys,
                                params.pool, params.alpha)

    if not _is_int(n) or n < 1:
        out.append(f"n must be a positive integer (got {n!r})")

    if len(mu) == 0:
        out.append("mu is empty")
    if len(keys) == 0:
        out.append("keys is empty")
    if len(mu) != len(keys):
        out.append(f"mu has {len(mu)} entries but keys has {len(keys)}")

    mu_ok = True
    for i, m in enumerate(mu):
        if not isinstance(m, (int, float)) or not math.isfinite(m) or m <= 0:
            out.append(f"mu[{i}] must be a positive probability (got {m!r})")
            mu_ok = False
        elif m > 1:
            out.append(f"mu[{i}] exceeds 1 (got {m!r})")
    if mu and mu_ok and abs(math.fsum(mu) - 1.0) > MU_TOL:
        out.append(f"mu does not sum to 1 (sum={math.fsum(mu)!r})")

    keys_ok = True
    for i, k in enumerate(keys):
        if not _is_int(k) or k < 1:
            out.append(f"keys[{i}] must be an integer >= 1 (got {k!r})")
            keys_ok = False
    if keys_ok and any(a > b for a, b in zip(keys, keys[1:])):
        out.append(f"keys not ascending {tuple(keys)}")

    if not _is_int(pool) or pool < 1:
        out.append(f"pool must be a positive integer (got {pool!r})")
    elif keys_ok and keys and max(keys) > pool:
        out.append(f"largest key ring {max(keys)} exceeds pool size {pool}")

    if not isinstance(alpha, (int, float)) or not (0 < alpha <= 1):
        out.append(f"alpha must lie in (0, 1] (got {alpha!r})")

    return out


def soft_warnings(params: ModelParams) -> list[str]:
    """Conditions the asymptotic results assume but sampling does not need."""
    out = []
    if params.keys and _is_int(params.pool) and 2 * max(params.keys) > params.pool:
        out.append(f"largest key ring {max(params.keys)} exceeds pool/2 "
                   f"({params.pool / 2:g}); asymptotic results assume K_r <= P/2")
    return out


@dataclass(frozen=True)
class ScalingConfig:
    """A family of parameter sets indexed by ``n`` for zero-one law sweeps.

    Key ring sizes are held fixed. The pool is either fixed (``pool``) or
    grows as ``ceil(sigma * n)``. ``sigma`` may be given together with a
    fixed pool, in which case it is only used by the ``P_n >= sigma n``
    diagnostic.
    """

    c: float
    n_values: tuple[int, ...]
    mu: tuple[float, ...]
    keys: tuple[int, ...]
    pool: int | None = None
    sigma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "keys", tuple(self.keys))

    def pool_at(self, n: int) -> int:
        if self.pool is not None:
            return self.pool
        return int(math.ceil(self.sigma * n))

    def params_at(self, n: int, alpha: float = 1.0) -> ModelParams:
        return ModelParams(n=n, mu=self.mu, keys=self.keys,
                           pool=self.pool_at(n), alpha=alpha)

    def check(self) -> "ScalingConfig":
        problems = validate_scaling(self)
        if problems:
            raise InvalidParams(problems)
        return self


def validate_scaling(cfg: ScalingConfig) -> list[str]:
    out = []
    if not isinstance(cfg.c, (int, float)) or not cfg.c > 0:
        out.append(f"c must be positive (got {cfg.c!r})")
    if not cfg.n_values:
        out.append("n_values is empty")
    if any(not _is_int(n) or n < 2 for n in cfg.n_values):
        out.append("every n in n_values must be an integer >= 2")
    if any(a >= b for a, b in zip(cfg.n_values, cfg.n_values[1:])):
        out.append("n_values not strictly increasing")
    if cfg.sigma is not None and not cfg.sigma > 0:
        out.append(f"sigma must be positive (got {cfg.sigma!r})")
    if cfg.pool is None and cfg.sigma is None:
        out.append("either pool or sigma must be given")
    if out:
        return out
    for n in cfg.n_values:
        for msg in validate(cfg.params_at(n)):
            out.append(f"n={n}: {msg}")
    return out


# -- plain-text config files ------------------------------------------------

def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def read_config(path: str | Path) -> dict[str, str]:
    return parse_config(Path(path).read_text())


def parse_floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(",") if x.strip())


def parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x.strip())


def params_from_mapping(m: Mapping[str, str]) -> ModelParams:
    """Build ``ModelParams`` from string values (config file or CLI flags).

    Accepted keys: ``n``, ``mu``, ``K`` (or ``keys``), ``P`` (or ``pool``),
    ``alpha``. Missing keys raise ``KeyError`` naming the key.
    """
    def get(*names):
        for name in names:
            if name in m and m[name] is not None:
                return m[name]
        raise KeyError(names[0])

    alpha = m.get("alpha")
    return ModelParams(
        n=int(get("n")),
        mu=parse_floats(get("mu")),
        keys=parse_ints(get("K", "keys")),
        pool=int(float(get("P", "pool"))),
        alpha=1.0 if alpha is None else float(alpha),
    )
