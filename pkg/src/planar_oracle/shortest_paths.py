"""Exact distance kernels: binary-heap Dijkstra and blocked Floyd-Warshall."""

from __future__ import annotations

import numpy as np

from . import _backend

DEFAULT_BLOCK = 64
INF = np.inf


def dijkstra_sssp(g, source, *, target=None, backend=None):
    """Distances from ``source`` to every vertex; unreachable is ``inf``.

    With ``target`` set the search stops once it is settled; entries for
    unsettled vertices are then only upper bounds.
    """
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range for n={g.n}")
    k = _backend.get(backend)
    return k.dijkstra(g.indptr, g.indices, g.weights, int(source),
                      -1 if target is None else int(target))


def dijkstra_rows(g, sources, out=None, *, backend=None):
    """Stack of SSSP rows, one per source, written into ``out`` if given."""
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    if len(sources) and (sources.min() < 0 or sources.max() >= g.n):
        raise IndexError("source out of range")
    if out is None:
        out = np.empty((len(sources), g.n))
    _backend.get(backend).dijkstra_rows(g.indptr, g.indices, g.weights, sources, out)
    return out


def adjacency_matrix(g):
    """Dense initial table: weights on edges, 0 on the diagonal, inf elsewhere."""
    D = np.full((g.n, g.n), INF)
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    np.minimum.at(D, (src, g.indices), g.weights)
    np.fill_diagonal(D, 0.0)
    return D


def floyd_warshall_inplace(D, block=DEFAULT_BLOCK, *, backend=None):
    """Close ``D`` (C-contiguous float64, square) under min-plus, in place."""
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    _backend.get(backend).floyd_warshall(D, int(block))
    return D


def apsp_dense(g, block=DEFAULT_BLOCK, *, out=None, backend=None):
    """All-pairs distances of ``g`` by cache-blocked Floyd-Warshall.

    Three passes per pivot block: the diagonal block, then its row and
    column panels, then every remaining block. The result does not depend
    on ``block``.
    """
    if g.n < 1:
        raise ValueError("apsp_dense needs at least one vertex")
    if out is None:
        out = adjacency_matrix(g)
    else:
        out[...] = adjacency_matrix(g)
    return floyd_warshall_inplace(out, block, backend=backend)


def min_plus_combine(a, b, *, backend=None):
    """``min_i a[i] + b[i]``; ``inf`` for empty input."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return float(_backend.get(backend).min_plus_combine(a, b))
