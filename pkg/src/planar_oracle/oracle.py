"""Preprocessing: per-component APSP tables, the boundary graph, and its distances."""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cluster import Placement, place_components
from .graph import Graph
from .partition import Partition, partition_graph, reorder_vertices
from .shortest_paths import DEFAULT_BLOCK, dijkstra_rows, floyd_warshall_inplace


@dataclass(frozen=True, eq=False)
class Layout:
    """Index arithmetic shared by every table, in reordered vertex ids.

    Component ``c`` owns ids ``offsets[c]:offsets[c+1]``, the first
    ``nboundary[c]`` of them boundary vertices. Boundary-graph ids are
    component-major, so component ``c`` owns BG ids
    ``bg_offsets[c]:bg_offsets[c+1]``.
    """

    offsets: np.ndarray
    nboundary: np.ndarray

    @classmethod
    def from_partition(cls, p):
        return cls(p.offsets(), p.boundary_sizes.astype(np.int64))

    @property
    def k(self):
        return len(self.nboundary)

    @property
    def n(self):
        return int(self.offsets[-1])

    @property
    def sizes(self):
        return np.diff(self.offsets)

    @property
    def bg_offsets(self):
        off = np.zeros(self.k + 1, dtype=np.int64)
        np.cumsum(self.nboundary, out=off[1:])
        return off

    @property
    def ct_start(self):
        off = np.zeros(self.k + 1, dtype=np.int64)
        np.cumsum(self.sizes**2, out=off[1:])
        return off

    @property
    def comp_of(self):
        return np.repeat(np.arange(self.k, dtype=np.int64), self.sizes)

    @property
    def b(self):
        return int(self.nboundary.sum())


class ComponentTables:
    """Dense intra-component distance matrices, concatenated row-major."""

    def __init__(self, layout, flat=None):
        self.layout = layout
        start = layout.ct_start
        self.flat = np.empty(int(start[-1])) if flat is None else flat
        self._start = start

    def __getitem__(self, c):
        s = int(self.layout.sizes[c])
        return self.flat[self._start[c]:self._start[c + 1]].reshape(s, s)

    def __len__(self):
        return self.layout.k


@dataclass(frozen=True, eq=False)
class BoundaryGraph:
    """Graph on the boundary vertices; ``global_of[i]`` is the reordered id of BG vertex ``i``."""

    graph: Graph
    global_of: np.ndarray

    @property
    def b(self):
        return self.graph.n

    @property
    def num_edges(self):
        return self.graph.m


class BoundaryTables:
    """Rows of the BG distance matrix, grouped by the component owning the source."""

    def __init__(self, layout, matrix):
        self.layout = layout
        self.matrix = matrix
        self._off = layout.bg_offsets

    def __getitem__(self, c):
        return self.matrix[self._off[c]:self._off[c + 1]]

    def __len__(self):
        return self.layout.k


@dataclass(eq=False)
class Oracle:
    partition: Partition
    layout: Layout
    component_tables: ComponentTables
    boundary_graph: BoundaryGraph
    boundary_tables: BoundaryTables
    placement: Placement
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        lay = self.layout
        self._comp_of = lay.comp_of
        self._bg_offsets = lay.bg_offsets
        self._ct_start = lay.ct_start

    @property
    def n(self):
        return self.partition.n

    @property
    def k(self):
        return self.partition.k

    @property
    def b(self):
        return self.boundary_graph.b

    @property
    def permutation(self):
        return self.partition.permutation

    @property
    def stored_entries(self):
        """Matrix entries held across all workers."""
        return int(self.component_tables.flat.size + self.boundary_tables.matrix.size)

    def kernel_args(self):
        """Flat arrays in the order the query kernels expect them."""
        return (
            self.component_tables.flat,
            self.boundary_tables.matrix,
            self._comp_of,
            self.layout.offsets,
            self.layout.nboundary,
            self._bg_offsets,
            self._ct_start,
        )

    def with_placement(self, workers, policy="round-robin"):
        """Same tables, components spread over ``min(workers, k)`` workers."""
        pl = place_components(self.k, min(workers, self.k), policy)
        return dataclasses.replace(self, placement=pl, stats=dict(self.stats))

    def table_entries_per_worker(self):
        sizes = self.layout.sizes
        per_comp = sizes**2 + self.layout.nboundary * self.b
        return np.bincount(self.placement.owner, weights=per_comp,
                           minlength=self.placement.p).astype(np.int64)


def _pool_map(fn, items, width):
    if width <= 1:
        for it in items:
            fn(it)
        return
    with ThreadPoolExecutor(max_workers=width) as ex:
        for _ in ex.map(fn, items):
            pass


def component_apsp(g, layout, workers=1, block=DEFAULT_BLOCK, backend=None):
    """APSP(C) for every component of the reordered graph ``g``."""
    tables = ComponentTables(layout)
    off = layout.offsets

    def solve(c):
        lo, hi = int(off[c]), int(off[c + 1])
        D = tables[c]
        D.fill(np.inf)
        np.fill_diagonal(D, 0.0)
        a, b = g.indptr[lo], g.indptr[hi]
        src = np.repeat(np.arange(hi - lo), np.diff(g.indptr[lo:hi + 1]))
        dst = g.indices[a:b] - lo
        inside = (dst >= 0) & (dst < hi - lo)
        D[src[inside], dst[inside]] = g.weights[a:b][inside]
        floyd_warshall_inplace(D, block, backend=backend)

    _pool_map(solve, range(layout.k), min(workers, layout.k))
    return tables


def build_boundary_graph(g, layout, tables):
    """Boundary vertices joined by cross edges of ``g`` and per-component clique edges.

    Clique edge ``(v, w)`` carries the intra-component distance; pairs that
    are disconnected inside their component get no clique edge. Original
    edges between two boundary vertices of one component are subsumed by
    the clique edge, whose weight is never larger.
    """
    off = layout.offsets
    bgo = layout.bg_offsets
    nb = layout.nboundary
    us, vs, ws = [], [], []
    for c in range(layout.k):
        m = int(nb[c])
        if m < 2:
            continue
        i, j = np.triu_indices(m, 1)
        w = tables[c][i, j]
        fin = np.isfinite(w)
        us.append(i[fin] + bgo[c])
        vs.append(j[fin] + bgo[c])
        ws.append(w[fin])
    comp = layout.comp_of
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    cross = (comp[src] != comp[g.indices]) & (src < g.indices)
    a, b = src[cross], g.indices[cross]
    us.append(a - off[comp[a]] + bgo[comp[a]])
    vs.append(b - off[comp[b]] + bgo[comp[b]])
    ws.append(g.weights[cross])
    bg = Graph._from_arrays(layout.b, np.concatenate(us), np.concatenate(vs),
                            np.concatenate(ws), merge="min")
    global_of = np.concatenate(
        [np.arange(off[c], off[c] + nb[c], dtype=np.int64) for c in range(layout.k)]
        or [np.empty(0, dtype=np.int64)]
    )
    return BoundaryGraph(bg, global_of)


def boundary_apsp(bg, layout, workers=1, backend=None):
    """Exact BG distances from every boundary vertex, one Dijkstra per row."""
    bgo = layout.bg_offsets
    matrix = np.empty((bg.b, bg.b))

    def solve(c):
        lo, hi = int(bgo[c]), int(bgo[c + 1])
        if hi > lo:
            dijkstra_rows(bg.graph, np.arange(lo, hi), out=matrix[lo:hi], backend=backend)

    _pool_map(solve, range(layout.k), min(workers, layout.k))
    return BoundaryTables(layout, matrix)


def build_oracle(g, k, workers=1, seed=0, *, partition=None, block=DEFAULT_BLOCK,
                 backend=None):
    """Partition, per-component APSP, boundary graph and its distances.

    The tables do not depend on ``workers``; it sets the task-pool width of
    the two table phases and the component placement.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    t0 = time.perf_counter()
    if partition is None:
        partition = partition_graph(g, k, seed)
    elif partition.k != k or partition.n != g.n:
        raise ValueError("partition does not match graph and k")
    g2, p2 = reorder_vertices(g, partition)
    layout = Layout.from_partition(p2)
    t1 = time.perf_counter()
    tables = component_apsp(g2, layout, workers, block, backend)
    t2 = time.perf_counter()
    bg = build_boundary_graph(g2, layout, tables)
    btables = boundary_apsp(bg, layout, workers, backend)
    t3 = time.perf_counter()
    stats = {
        "partition_s": t1 - t0,
        "component_apsp_s": t2 - t1,
        "boundary_s": t3 - t2,
    }
    placement = place_components(k, min(workers, k))
    return Oracle(partition, layout, tables, bg, btables, placement, stats)
