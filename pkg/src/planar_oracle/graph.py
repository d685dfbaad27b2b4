"""Weighted undirected graphs in CSR form, text formats, and planar generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX_VERTICES = 2**32

FORMATS = ("edge-list", "dimacs")


class GraphError(ValueError):
    """Invalid graph data."""


class ParseError(GraphError):
    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class NegativeWeightError(GraphError):
    pass


class AsymmetryError(GraphError):
    pass


class Graph:
    """Immutable undirected graph; each edge is stored as two arcs.

    ``indptr``/``indices``/``weights`` follow the usual CSR layout with
    neighbours sorted by id. The constructor does not validate; use
    :meth:`from_edges` for untrusted input, or :func:`validate`.
    """

    __slots__ = ("n", "indptr", "indices", "weights")

    def __init__(self, n, indptr, indices, weights):
        self.n = int(n)
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)
        self.weights = _frozen(weights, np.float64)
        if len(self.indptr) != self.n + 1:
            raise GraphError(f"indptr has length {len(self.indptr)}, expected {self.n + 1}")

    @classmethod
    def from_edges(cls, n, edges, *, merge="error"):
        """Build from undirected ``(u, v, w)`` triples.

        ``merge`` controls repeated pairs: ``"error"`` raises
        :class:`AsymmetryError`, ``"min"`` keeps the lightest.
        """
        n = int(n)
        if n < 0 or n > MAX_VERTICES:
            raise GraphError(f"vertex count {n} out of range")
        arr = np.asarray(edges, dtype=np.float64).reshape(-1, 3)
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        w = arr[:, 2].copy()
        return cls._from_arrays(n, u, v, w, merge=merge)

    @classmethod
    def _from_arrays(cls, n, u, v, w, *, merge="error"):
        if len(u):
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise GraphError("edge endpoint out of range")
            if not np.all(np.isfinite(w)):
                raise GraphError("edge weights must be finite")
            bad = np.flatnonzero(w < 0)
            if len(bad):
                i = bad[0]
                raise NegativeWeightError(f"negative weight {w[i]} on edge ({u[i]}, {v[i]})")
            loops = np.flatnonzero(u == v)
            if len(loops):
                raise GraphError(f"self-loop at vertex {u[loops[0]]}")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        order = np.lexsort((w, hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if dup.any():
                if merge == "error":
                    i = np.flatnonzero(dup)[0]
                    raise AsymmetryError(
                        f"edge ({lo[i]}, {hi[i]}) listed more than once; "
                        "undirected edges must appear exactly once"
                    )
                keep = np.concatenate(([True], ~dup))
                lo, hi, w = lo[keep], hi[keep], w[keep]
        return cls.from_arcs(n, np.concatenate((lo, hi)), np.concatenate((hi, lo)),
                             np.concatenate((w, w)))

    @classmethod
    def from_arcs(cls, n, src, dst, w):
        """CSR from already-symmetric arc arrays (no checks)."""
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, w)

    @property
    def m(self):
        """Number of undirected edges."""
        return len(self.indices) // 2

    def degree(self, v=None):
        deg = np.diff(self.indptr)
        return deg if v is None else int(deg[v])

    def neighbors(self, v):
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def edges(self):
        """Undirected edges as ``(u, v, w)`` arrays with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return src[keep], self.indices[keep], self.weights[keep]

    def weight(self, u, v):
        nbrs, wts = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        if i < len(nbrs) and nbrs[i] == v:
            return float(wts[i])
        return math.inf

    def relabel(self, perm):
        """Isomorphic copy where old vertex ``v`` becomes ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        src = np.repeat(perm, np.diff(self.indptr))
        return Graph.from_arcs(self.n, src, perm[self.indices], self.weights.copy())

    def subgraph(self, vertices):
        """Induced subgraph; local id ``i`` is ``vertices[i]``."""
        vertices = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = (local[src] >= 0) & (local[self.indices] >= 0)
        return Graph.from_arcs(len(vertices), local[src[keep]], local[self.indices[keep]],
                               self.weights[keep])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    if a.flags.writeable:
        a = a.copy()
        a.flags.writeable = False
    return a


# ------------------------------------------------------------------ file I/O


def load_graph(path, format="edge-list"):
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if format == "edge-list":
        return _parse_edge_list(lines, path)
    if format == "dimacs":
        return _parse_dimacs(lines, path)
    raise ValueError(f"unknown graph format {format!r}; expected one of {FORMATS}")


def _parse_edge_list(lines, path=None):
    header = None
    us, vs, ws = [], [], []
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if header is None:
            if len(parts) != 2:
                raise ParseError("expected header 'n m'", lineno, path)
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise ParseError(f"bad header {s!r}", lineno, path) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("negative vertex or edge count", lineno, path)
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'u v w', got {s!r}", lineno, path)
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"malformed edge {s!r}", lineno, path) from None
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex id out of range 0..{n - 1}", lineno, path)
        if w < 0:
            raise NegativeWeightError(f"{path}:{lineno}: negative weight {w}")
        if not math.isfinite(w):
            raise ParseError(f"non-finite weight {parts[2]!r}", lineno, path)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno, path)
        us.append(u)
        vs.append(v)
        ws.append(w)
    if header is None:
        raise ParseError("missing header 'n m'", None, path)
    if len(us) != header[1]:
        raise ParseError(f"header declares {header[1]} edges, found {len(us)}", None, path)
    return Graph._from_arrays(
        header[0],
        np.array(us, dtype=np.int64),
        np.array(vs, dtype=np.int64),
        np.array(ws, dtype=np.float64),
        merge="error",
    )


def _parse_dimacs(lines, path=None):
    header = None
    us, vs, ws = [], [], []
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s[0] == "c":
            continue
        parts = s.split()
        if parts[0] == "p":
            if header is not None or len(parts) != 4 or parts[1] != "sp":
                raise ParseError(f"bad problem line {s!r}", lineno, path)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"bad problem line {s!r}", lineno, path) from None
        elif parts[0] == "a":
            if header is None:
                raise ParseError("arc before 'p sp' line", lineno, path)
            if len(parts) != 4:
                raise ParseError(f"expected 'a u v w', got {s!r}", lineno, path)
            try:
                u, v, w = int(parts[1]) - 1, int(parts[2]) - 1, float(parts[3])
            except ValueError:
                raise ParseError(f"malformed arc {s!r}", lineno, path) from None
            if not (0 <= u < header[0] and 0 <= v < header[0]):
                raise ParseError(f"vertex id out of range 1..{header[0]}", lineno, path)
            if w < 0:
                raise NegativeWeightError(f"{path}:{lineno}: negative weight {w}")
            if not math.isfinite(w):
                raise ParseError(f"non-finite weight {parts[3]!r}", lineno, path)
            if u == v:
                continue
            us.append(u)
            vs.append(v)
            ws.append(w)
        else:
            raise ParseError(f"unknown line type {parts[0]!r}", lineno, path)
    if header is None:
        raise ParseError("missing 'p sp n m' line", None, path)
    if len(us) > header[1]:
        raise ParseError(f"header declares {header[1]} arcs, found {len(us)}", None, path)
    return Graph._from_arrays(
        header[0],
        np.array(us, dtype=np.int64),
        np.array(vs, dtype=np.int64),
        np.array(ws, dtype=np.float64),
        merge="min",
    )


def _fmt_weight(w):
    return str(int(w)) if float(w).is_integer() and abs(w) < 2**53 else repr(float(w))


def save_graph(g, path, format="edge-list"):
    u, v, w = g.edges()
    if format == "edge-list":
        lines = [f"{g.n} {len(u)}"]
        lines += [f"{a} {b} {_fmt_weight(c)}" for a, b, c in zip(u.tolist(), v.tolist(), w.tolist())]
    elif format == "dimacs":
        lines = [f"p sp {g.n} {2 * len(u)}"]
        for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()):
            c = _fmt_weight(c)
            lines.append(f"a {a + 1} {b + 1} {c}")
            lines.append(f"a {b + 1} {a + 1} {c}")
    else:
        raise ValueError(f"unknown graph format {format!r}; expected one of {FORMATS}")
    Path(path).write_text("\n".join(lines) + "\n")


# --------------------------------------------------------------- generators


@dataclass(frozen=True)
class WeightModel:
    """Edge weight distribution for the generators.

    ``integer`` draws whole numbers in ``[lo, hi]``; path sums then stay
    exact in float64, which keeps distance comparisons bit-exact.
    """

    kind: str = "unit"
    lo: float = 1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind not in ("unit", "uniform", "integer"):
            raise ValueError(f"unknown weight model {self.kind!r}")
        if self.kind != "unit":
            if not (0 <= self.lo <= self.hi) or not math.isfinite(self.hi):
                raise ValueError(f"need 0 <= lo <= hi, got lo={self.lo}, hi={self.hi}")

    @classmethod
    def unit(cls):
        return cls("unit")

    @classmethod
    def uniform(cls, lo, hi):
        return cls("uniform", float(lo), float(hi))

    @classmethod
    def integer(cls, lo, hi):
        return cls("integer", float(int(lo)), float(int(hi)))

    @classmethod
    def parse(cls, text):
        """``unit``, ``uniform:LO,HI`` or ``integer:LO,HI``."""
        kind, _, args = text.partition(":")
        if kind == "unit":
            return cls.unit()
        try:
            lo, hi = (float(x) for x in args.split(","))
        except ValueError:
            raise ValueError(f"bad weight model {text!r}") from None
        return cls.uniform(lo, hi) if kind == "uniform" else cls(kind, lo, hi)

    def draw(self, rng, size):
        if self.kind == "unit":
            return np.ones(size)
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi, size)
        return rng.integers(int(self.lo), int(self.hi), size, endpoint=True).astype(np.float64)


def _check_dims(rows, cols):
    if int(rows) != rows or int(cols) != cols or rows < 1 or cols < 1:
        raise ValueError(f"grid dimensions must be positive integers, got {rows}x{cols}")
    if rows * cols > MAX_VERTICES:
        raise OverflowError(f"{rows}x{cols} grid exceeds {MAX_VERTICES} vertices")


def _grid_pairs(rows, cols):
    ids = np.arange(rows * cols, dtype=np.int64).reshape(rows, cols)
    horiz = np.stack((ids[:, :-1].ravel(), ids[:, 1:].ravel()), axis=1)
    vert = np.stack((ids[:-1, :].ravel(), ids[1:, :].ravel()), axis=1)
    return ids, np.concatenate((horiz, vert))


def generate_grid(rows, cols, weight_model=None, seed=0):
    """4-neighbour grid; vertex ``(r, c)`` has id ``r * cols + c``."""
    _check_dims(rows, cols)
    weight_model = weight_model or WeightModel.unit()
    rng = np.random.default_rng(seed)
    _, pairs = _grid_pairs(rows, cols)
    w = weight_model.draw(rng, len(pairs))
    return Graph._from_arrays(rows * cols, pairs[:, 0], pairs[:, 1], w)


def generate_triangulated_grid(rows, cols, weight_model=None, seed=0):
    """Grid plus one diagonal per unit cell, direction drawn from ``seed``."""
    _check_dims(rows, cols)
    weight_model = weight_model or WeightModel.unit()
    rng = np.random.default_rng(seed)
    ids, pairs = _grid_pairs(rows, cols)
    flip = rng.integers(0, 2, size=(max(rows - 1, 0), max(cols - 1, 0))).astype(bool)
    tl, tr = ids[:-1, :-1], ids[:-1, 1:]
    bl, br = ids[1:, :-1], ids[1:, 1:]
    a = np.where(flip, tr, tl).ravel()
    b = np.where(flip, bl, br).ravel()
    pairs = np.concatenate((pairs, np.stack((a, b), axis=1)))
    w = weight_model.draw(rng, len(pairs))
    return Graph._from_arrays(rows * cols, pairs[:, 0], pairs[:, 1], w)


# --------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    n: int
    m: int
    connected: bool
    num_components: int
    asymmetric: list = field(default_factory=list)
    negative: list = field(default_factory=list)
    self_loops: list = field(default_factory=list)
    duplicates: list = field(default_factory=list)
    unsorted: list = field(default_factory=list)

    @property
    def ok(self):
        return not (self.asymmetric or self.negative or self.self_loops
                    or self.duplicates or self.unsorted)


def validate(g):
    """Check the structural invariants of ``g``; never raises."""
    n = g.n
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    dst = g.indices
    w = g.weights
    rep = ValidationReport(n=n, m=len(dst) // 2, connected=True, num_components=0)

    bad = np.flatnonzero((w < 0) | ~np.isfinite(w))
    rep.negative = [(int(src[i]), int(dst[i]), float(w[i])) for i in bad]
    loops = np.flatnonzero(src == dst)
    rep.self_loops = sorted({int(src[i]) for i in loops})

    arcs = {}
    for a, b, c in zip(src.tolist(), dst.tolist(), w.tolist()):
        if (a, b) in arcs:
            rep.duplicates.append((a, b))
        arcs[(a, b)] = c
    for (a, b), c in arcs.items():
        back = arcs.get((b, a))
        if back is None or back != c:
            if a < b or back is None:
                rep.asymmetric.append((a, b))
    for v in range(n):
        nb = dst[g.indptr[v]:g.indptr[v + 1]]
        if len(nb) > 1 and np.any(nb[1:] <= nb[:-1]):
            rep.unsorted.append(v)

    labels = connected_components(g)
    rep.num_components = int(labels.max()) + 1 if n else 0
    rep.connected = rep.num_components <= 1
    return rep


def connected_components(g):
    """Component label per vertex, labels in order of smallest member."""
    labels = np.full(g.n, -1, dtype=np.int64)
    ptr = g.indptr.tolist()
    nbr = g.indices.tolist()
    current = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[s] = current
        stack = [s]
        while stack:
            u = stack.pop()
            for e in range(ptr[u], ptr[u + 1]):
                v = nbr[e]
                if 0 <= v < g.n and labels[v] < 0:
                    labels[v] = current
                    stack.append(v)
        current += 1
    return labels
