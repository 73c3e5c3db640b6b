"""Random realizations of the failure-thinned inhomogeneous random key graph.

Edges are stored as an ``(m, 2)`` int64 array of pairs ``u < v`` in
lexicographic order. Class indices are 0-based.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import ModelParams

# above this fill ratio a partial shuffle beats rejection
SHUFFLE_RATIO = 1 / 64


@dataclass(frozen=True)
class RngSpec:
    """``(seed, stream)`` pair; fully determines one trial's randomness.

    Streams are derived with ``SeedSequence(seed, spawn_key=(stream,))`` feeding
    a counter-based Philox generator, so trial ``k`` never depends on how many
    trials ran before it.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))


def trial_rng(seed: int, stream: int) -> np.random.Generator:
    return RngSpec(seed, stream).generator()


def sample_classes(n: int, mu: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """I.i.d. class labels in ``range(len(mu))``."""
    if len(mu) == 1:
        return np.zeros(n, dtype=np.int64)
    cdf = np.cumsum(mu)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


def sample_rings(P: int, K: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform K-subsets of ``range(P)``, one sorted row each.

    Sparse rings (``K/P <= 1/64``) use whole-row rejection: draw K ids with
    replacement and redraw any row containing a repeat. Dense rings use a
    vectorized partial Fisher-Yates shuffle. Both are exactly uniform.
    """
    if not 1 <= K <= P:
        raise ValueError(f"ring size {K} outside [1, {P}]")
    if count == 0:
        return np.empty((0, K), dtype=np.int64)

    if K > P * SHUFFLE_RATIO:
        perm = np.tile(np.arange(P, dtype=np.int64), (count, 1))
        rows = np.arange(count)
        for t in range(K):
            j = t + rng.integers(0, P - t, size=count)
            tmp = perm[rows, t].copy()
            perm[rows, t] = perm[rows, j]
            perm[rows, j] = tmp
        out = perm[:, :K]
        out.sort(axis=1)
        return np.ascontiguousarray(out)

    out = rng.integers(0, P, size=(count, K))
    out.sort(axis=1)
    bad = np.flatnonzero((out[:, 1:] == out[:, :-1]).any(axis=1))
    while bad.size:
        redo = rng.integers(0, P, size=(bad.size, K))
        redo.sort(axis=1)
        out[bad] = redo
        bad = bad[(redo[:, 1:] == redo[:, :-1]).any(axis=1)]
    return out


def sample_ring(P: int, K: int, rng: np.random.Generator) -> np.ndarray:
    return sample_rings(P, K, 1, rng)[0]


def _key_graph_flat(node_ids: np.ndarray, key_ids: np.ndarray, n: int) -> np.ndarray:
    # inverted index: group (key, node) entries by key, emit every pair inside a group
    sort_keys = key_ids.astype(np.uint16) if key_ids.size and key_ids.max() < 2**16 else key_ids
    order = np.argsort(sort_keys, kind="stable")  # radix sort for 16-bit keys
    ks = key_ids[order]
    nodes = node_ids[order]
    L = ks.size
    if L == 0:
        return np.empty((0, 2), dtype=np.int64)
    new_group = np.empty(L, dtype=bool)
    new_group[0] = True
    np.not_equal(ks[1:], ks[:-1], out=new_group[1:])
    starts = np.flatnonzero(new_group)
    ends = np.append(starts[1:], L)
    group_end = np.repeat(ends, ends - starts)
    pos = np.arange(L)
    cnt = group_end - pos - 1
    total = int(cnt.sum())
    if total == 0:
        return np.empty((0, 2), dtype=np.int64)
    first = np.repeat(pos, cnt)
    step = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    second = first + 1 + step
    u = nodes[first]
    v = nodes[second]
    # stable sort keeps node order within a key, and a ring never repeats a key
    codes = np.unique(u * np.int64(n) + v)
    return np.column_stack((codes // n, codes % n))


def build_key_graph(rings: Sequence[np.ndarray]) -> np.ndarray:
    """All pairs of nodes whose rings intersect."""
    n = len(rings)
    sizes = np.fromiter((len(r) for r in rings), dtype=np.int64, count=n)
    node_ids = np.repeat(np.arange(n, dtype=np.int64), sizes)
    key_ids = (np.concatenate([np.asarray(r, dtype=np.int64) for r in rings])
               if n else np.empty(0, dtype=np.int64))
    return _key_graph_flat(node_ids, key_ids, n)


def thin_edges(edges: np.ndarray, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Keep each edge independently with probability ``alpha``."""
    keep = rng.random(len(edges)) < alpha
    return edges[keep]


@dataclass(frozen=True)
class SampledGraph:
    n: int
    r: int
    pool: int
    alpha: float
    class_of: np.ndarray
    ring_keys: np.ndarray      # every ring concatenated in node order
    ring_offsets: np.ndarray   # ring x is ring_keys[ring_offsets[x]:ring_offsets[x+1]]
    edges: np.ndarray
    key_edges: np.ndarray | None = None

    @property
    def rings(self) -> list[np.ndarray]:
        return np.split(self.ring_keys, self.ring_offsets[1:-1])

    def ring(self, x: int) -> np.ndarray:
        return self.ring_keys[self.ring_offsets[x]:self.ring_offsets[x + 1]]

    def to_edgelist(self) -> str:
        buf = io.StringIO()
        write_edgelist(self, buf)
        return buf.getvalue()


def sample_graph(params: ModelParams, rng: np.random.Generator,
                 keep_key_edges: bool = False) -> SampledGraph:
    params.check()
    n, P = params.n, params.pool
    keys = np.asarray(params.keys, dtype=np.int64)

    classes = sample_classes(n, params.mu, rng)
    sizes = keys[classes]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    ring_keys = np.empty(offsets[-1], dtype=np.int64)
    for i, K in enumerate(params.keys):
        members = np.flatnonzero(classes == i)
        block = sample_rings(P, K, members.size, rng)
        ring_keys[(offsets[members][:, None] + np.arange(K)).ravel()] = block.ravel()

    node_ids = np.repeat(np.arange(n, dtype=np.int64), sizes)
    key_edges = _key_graph_flat(node_ids, ring_keys, n)
    edges = thin_edges(key_edges, params.alpha, rng)
    return SampledGraph(n, params.r, P, params.alpha, classes, ring_keys, offsets,
                        edges, key_edges if keep_key_edges else None)


# -- edge-list files ------------------------------------------------------------
# line 1: "n r P alpha"; line 2: class of each node (1-based);
# then one "u v" line per surviving edge, nodes 0-based.

def write_edgelist(graph: SampledGraph, fh) -> None:
    fh.write(f"{graph.n} {graph.r} {graph.pool} {graph.alpha:.10g}\n")
    fh.write(" ".join(str(int(c) + 1) for c in graph.class_of) + "\n")
    for u, v in graph.edges:
        fh.write(f"{u} {v}\n")


def read_edgelist(source: str | Path) -> tuple[dict, np.ndarray, np.ndarray]:
    """Parse an edge-list file into ``(header, class_of, edges)``.

    ``class_of`` comes back 0-based, matching :class:`SampledGraph`.
    """
    lines = Path(source).read_text().splitlines()
    n, r, P, alpha = lines[0].split()
    header = {"n": int(n), "r": int(r), "P": int(P), "alpha": float(alpha)}
    class_of = np.array([int(c) - 1 for c in lines[1].split()], dtype=np.int64)
    pairs = [tuple(map(int, ln.split())) for ln in lines[2:] if ln.strip()]
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return header, class_of, edges
