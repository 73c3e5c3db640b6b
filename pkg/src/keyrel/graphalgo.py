"""Isolated nodes and connected components of sampled graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np


@dataclass(frozen=True)
class TrialOutcome:
    isolated_count: int
    component_count: int
    connected: bool
    largest_component: int


def _as_n_edges(graph_or_n, edges=None):
    if edges is None:
        return graph_or_n.n, graph_or_n.edges
    return int(graph_or_n), edges


def count_isolated(graph_or_n, edges=None) -> int:
    """Number of nodes with no incident edge.

    Accepts a ``SampledGraph`` or ``(n, edges)``.
    """
    n, edges = _as_n_edges(graph_or_n, edges)
    if n == 0:
        return 0
    deg = np.bincount(np.asarray(edges, dtype=np.int64).ravel(), minlength=n)
    return int(np.count_nonzero(deg == 0))


@numba.njit(cache=True)
def _union_find(n, edges):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    count = n
    for k in range(edges.shape[0]):
        a = edges[k, 0]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = edges[k, 1]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        count -= 1
    largest = 0
    for x in range(n):
        if parent[x] == x and size[x] > largest:
            largest = size[x]
    return count, largest


def components(graph_or_n, edges=None) -> TrialOutcome:
    """Component structure via union-find (union by size, path halving).

    A single node counts as connected.
    """
    n, edges = _as_n_edges(graph_or_n, edges)
    e = np.ascontiguousarray(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
    count, largest = _union_find(n, e)
    return TrialOutcome(
        isolated_count=count_isolated(n, e),
        component_count=int(count),
        connected=count == 1,
        largest_component=int(largest),
    )
