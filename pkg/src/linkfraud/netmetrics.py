"""Network summary statistics and set-overlap estimators.

All ratios are computed from exact integer counts; a zero denominator
raises :class:`UndefinedMetricError` rather than returning NaN or 0.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import sparse

from .errors import EstimateUndefinedError, UndefinedMetricError
from .subnet import SubnetView


def _nodes_edges(g):
    if isinstance(g, SubnetView):
        return g.members, g.edges
    return g.nodes, g.edges


def density(g) -> float:
    nodes, edges = _nodes_edges(g)
    n = len(nodes)
    if n < 2:
        raise UndefinedMetricError(f"density needs at least 2 nodes, got {n}")
    return len(edges) / (n * (n - 1))


def bipartite_density(edges_between: int, a_size: int, b_size: int) -> float:
    if a_size < 1 or b_size < 1:
        raise UndefinedMetricError("bipartite density needs two non-empty sides")
    if edges_between < 0 or edges_between > a_size * b_size:
        raise ValueError(f"edges_between={edges_between} outside [0, {a_size * b_size}]")
    return edges_between / (a_size * b_size)


def cross_edges(edges: Iterable[tuple], a: set, b: set) -> int:
    """Number of distinct node pairs joined by an edge with one end in each set."""
    pairs = set()
    for u, w in edges:
        if (u in a and w in b) or (u in b and w in a):
            pairs.add((u, w) if u in a else (w, u))
    return len(pairs)


def boomerang_bipartite_density(view: SubnetView) -> float:
    """Bipartite density between follower members and friend members."""
    a, b = set(view.followers), set(view.friends)
    return bipartite_density(cross_edges(view.edges, a, b), len(a), len(b))


def _undirected_csr(nodes, edges):
    index = {v: i for i, v in enumerate(sorted(nodes))}
    n = len(index)
    if not edges:
        return sparse.csr_matrix((n, n), dtype=np.int64)
    rows = np.fromiter((index[u] for u, _ in edges), dtype=np.int64, count=len(edges))
    cols = np.fromiter((index[w] for _, w in edges), dtype=np.int64, count=len(edges))
    a = sparse.coo_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
    a = (a + a.T).tocsr()
    a.data[:] = 1
    a.eliminate_zeros()
    return a


def triangle_counts(g) -> tuple[int, int]:
    """(number of triangles, number of connected triples) of the symmetrized graph."""
    nodes, edges = _nodes_edges(g)
    a = _undirected_csr(nodes, edges)
    deg = np.asarray(a.sum(axis=1)).ravel().astype(np.int64)
    triples = int(np.sum(deg * (deg - 1) // 2))
    closed = int((a @ a).multiply(a).sum())  # 6 * triangles
    return closed // 6, triples


def transitivity(g) -> float:
    """3 * triangles / connected triples, on the symmetrized simple graph."""
    tri, triples = triangle_counts(g)
    if triples == 0:
        raise UndefinedMetricError("transitivity undefined: no connected triples")
    return 3 * tri / triples


def reciprocity(g) -> float:
    """Fraction of edges whose reverse edge is also present."""
    _, edges = _nodes_edges(g)
    if not edges:
        raise UndefinedMetricError("reciprocity undefined: no edges")
    edges = set(edges)
    mutual = sum(1 for u, w in edges if (w, u) in edges)
    return mutual / len(edges)


def overlap_coefficient(a: Iterable, b: Iterable) -> float:
    a, b = set(a), set(b)
    if not a or not b:
        raise UndefinedMetricError("overlap coefficient needs two non-empty sets")
    return len(a & b) / min(len(a), len(b))


def mse_estimate(a: Iterable, b: Iterable) -> int:
    """Two-sample capture-recapture population estimate, rounded half-up."""
    a, b = set(a), set(b)
    inter = len(a & b)
    if inter == 0:
        raise EstimateUndefinedError("population estimate undefined: samples do not intersect")
    num = len(a) * len(b)
    return (2 * num + inter) // (2 * inter)


@dataclass(frozen=True)
class MetricReport:
    n_nodes: int
    n_edges: int
    density: float | None
    transitivity: float | None
    reciprocity: float | None
    bipartite_density: float | None = None

    def asdict(self) -> dict:
        return dataclasses.asdict(self)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except UndefinedMetricError:
        return None


def metric_report(g) -> MetricReport:
    """Summary statistics for a graph or view; undefined ratios are ``None``.

    Boomerang views additionally get the follower/friend bipartite density.
    """
    nodes, edges = _nodes_edges(g)
    bip = None
    if isinstance(g, SubnetView) and g.kind == "boomerang":
        bip = _maybe(boomerang_bipartite_density, g)
    return MetricReport(
        n_nodes=len(nodes),
        n_edges=len(edges),
        density=_maybe(density, g),
        transitivity=_maybe(transitivity, g),
        reciprocity=_maybe(reciprocity, g),
        bipartite_density=bip,
    )
