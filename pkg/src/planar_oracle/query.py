"""Point-to-point distance queries by two-level boundary stitching."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend


class OracleMismatchError(ValueError):
    """Oracle was built for a different graph."""


@dataclass(frozen=True)
class QueryStats:
    minplus_ops: int
    boundary_sizes: tuple
    transfer_entries: int
    same_component: bool


@dataclass(frozen=True)
class QueryResult:
    distance: float
    stats: QueryStats


def check_compatible(o, g):
    if o.n != g.n:
        raise OracleMismatchError(f"oracle has n={o.n}, graph has n={g.n}")


def _locate(o, v1, v2):
    n = o.n
    for v in (v1, v2):
        if not 0 <= v < n:
            raise IndexError(f"vertex {v} out of range for n={n}")
    perm = o.permutation
    return int(perm[v1]), int(perm[v2])


def _stats(o, u1, u2):
    comp = o._comp_of
    c1, c2 = int(comp[u1]), int(comp[u2])
    nb1 = int(o.layout.nboundary[c1])
    nb2 = int(o.layout.nboundary[c2])
    owner = o.placement.owner
    transfer = nb2 if owner[c1] != owner[c2] else 0
    return QueryStats(nb1 * nb2 + nb2, (nb1, nb2), transfer, c1 == c2)


def query(o, v1, v2, *, backend=None):
    """Exact ``dist(v1, v2)``; ids are in the caller's (original) numbering.

    For each boundary vertex b2 of v2's component, the best route from v1
    through its own boundary is found; the answer is then the best b2
    followed by the boundary prefix of v2's column. Same-component pairs
    also consider the intra-component distance directly.
    """
    u1, u2 = _locate(o, v1, v2)
    d = _backend.get(backend).query_one(*o.kernel_args(), u1, u2)
    return QueryResult(float(d), _stats(o, u1, u2))


def query_parallel_inner(o, v1, v2, workers=1, *, backend=None):
    """As :func:`query`, with the b2 loop split into static blocks over threads."""
    u1, u2 = _locate(o, v1, v2)
    k = _backend.get(backend)
    args = o.kernel_args()
    c2 = int(o._comp_of[u2])
    nb2 = int(o.layout.nboundary[c2])
    w = max(1, min(workers, nb2))
    bounds = [(i * nb2 // w, (i + 1) * nb2 // w) for i in range(w)]

    def part(b):
        return k.query_partial(*args, u1, u2, b[0], b[1])

    if w == 1:
        parts = [part(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=w) as ex:
            parts = list(ex.map(part, bounds))
    best = min(parts, default=np.inf)
    c1 = int(o._comp_of[u1])
    if c1 == c2:
        best = min(best, float(o.component_tables[c1][u1 - o.layout.offsets[c1],
                                                      u2 - o.layout.offsets[c1]]))
    return QueryResult(float(best), _stats(o, u1, u2))


def _as_pairs(pairs):
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return arr[:, 0].copy(), arr[:, 1].copy()


def batch_distances(o, pairs, workers=1, *, backend=None):
    """Distances only, as a float64 array; the fast path for bulk checks."""
    v1, v2 = _as_pairs(pairs)
    if len(v1) and (min(v1.min(), v2.min()) < 0 or max(v1.max(), v2.max()) >= o.n):
        raise IndexError(f"vertex id out of range for n={o.n}")
    perm = o.permutation
    u1, u2 = perm[v1], perm[v2]
    # group pairs by (source, target component) so the kernel can reuse work
    order = np.lexsort((u2, o._comp_of[u2], u1))
    u1 = np.ascontiguousarray(u1[order])
    u2 = np.ascontiguousarray(u2[order])
    res = np.empty(len(u1))
    out = np.empty(len(u1))
    k = _backend.get(backend)
    args = o.kernel_args()
    w = max(1, min(workers, len(u1)))
    if w == 1:
        if len(u1):
            k.query_many(*args, u1, u2, out)
        res[order] = out
        return res
    bounds = [(i * len(u1) // w, (i + 1) * len(u1) // w) for i in range(w)]

    def run(b):
        lo, hi = b
        k.query_many(*args, u1[lo:hi], u2[lo:hi], out[lo:hi])

    with ThreadPoolExecutor(max_workers=w) as ex:
        list(ex.map(run, bounds))
    res[order] = out
    return res


def batch_query(o, pairs, workers=1, *, backend=None):
    """Results for every pair, in input order; pairs are spread over threads."""
    v1, v2 = _as_pairs(pairs)
    dist = batch_distances(o, np.stack((v1, v2), axis=1), workers, backend=backend)
    perm = o.permutation
    return [
        QueryResult(float(d), _stats(o, int(perm[a]), int(perm[b])))
        for d, a, b in zip(dist, v1, v2)
    ]
