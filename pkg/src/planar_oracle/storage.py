"""Binary oracle files.

Layout, all little-endian::

    b"PSP1"  u32 version  u64 n  u64 k  u64 b
    permutation        n  x u64   (original id -> reordered id)
    assignment         n  x u64   (original id -> component)
    boundary flags     ceil(n/8) bytes, bit v%8 of byte v//8
    component offsets  k+1 x u64
    component tables   sum |C|^2 x f64, component by component, row-major
    boundary tables    b*b x f64, rows grouped by owning component
    BG edge count      u64 e
    BG edges           e x u64 src, e x u64 dst, e x f64 weight
    CRC-64/XZ          u64 over every preceding byte
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from . import _backend
from .cluster import place_components
from .graph import Graph
from .oracle import BoundaryGraph, BoundaryTables, ComponentTables, Layout, Oracle
from .partition import Partition

MAGIC = b"PSP1"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


class OracleFileError(ValueError):
    pass


class VersionMismatchError(OracleFileError):
    pass


class TruncatedFileError(OracleFileError):
    pass


class ChecksumError(OracleFileError):
    pass


def _sections(o):
    p = o.partition
    u, v, w = o.boundary_graph.graph.edges()
    yield _HEADER.pack(MAGIC, VERSION, o.n, o.k, o.b)
    yield p.permutation.astype("<u8")
    yield p.assignment.astype("<u8")
    yield np.packbits(p.boundary_flags, bitorder="little")
    yield o.layout.offsets.astype("<u8")
    yield o.component_tables.flat.astype("<f8", copy=False)
    yield o.boundary_tables.matrix.astype("<f8", copy=False)
    yield np.array([len(u)], dtype="<u8")
    yield u.astype("<u8")
    yield v.astype("<u8")
    yield w.astype("<f8", copy=False)


def to_bytes(o):
    """The exact file contents :func:`save_oracle` writes."""
    body = b"".join(s if isinstance(s, bytes) else s.tobytes() for s in _sections(o))
    crc = _backend.kernels.crc64(np.frombuffer(body, dtype=np.uint8))
    return body + struct.pack("<Q", crc)


def save_oracle(o, path):
    crc = 0
    crc64 = _backend.kernels.crc64
    with open(path, "wb") as fh:
        for s in _sections(o):
            buf = np.frombuffer(s, dtype=np.uint8) if isinstance(s, bytes) else \
                np.ascontiguousarray(s).reshape(-1).view(np.uint8)
            crc = crc64(buf, crc)
            fh.write(buf.data)
        fh.write(struct.pack("<Q", crc))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, dtype, count):
        dtype = np.dtype(dtype)
        end = self.pos + dtype.itemsize * count
        if end > len(self.data) - 8:
            raise TruncatedFileError(f"file ends inside a section (need {end + 8} bytes, have {len(self.data)})")
        arr = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.pos)
        self.pos = end
        return arr


def load_oracle(path, workers=1):
    """Read an oracle written by :func:`save_oracle`.

    The placement is not part of the file; it is recreated for ``workers``.
    """
    data = Path(path).read_bytes()
    return from_bytes(data, workers)


def from_bytes(data, workers=1):
    if len(data) < _HEADER.size + 8:
        raise TruncatedFileError(f"{len(data)} bytes is shorter than the header")
    magic, version, n, k, b = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise OracleFileError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"file format version {version}, expected {VERSION}")
    stored = struct.unpack_from("<Q", data, len(data) - 8)[0]
    actual = _backend.kernels.crc64(np.frombuffer(data, dtype=np.uint8, count=len(data) - 8))
    if stored != actual:
        raise ChecksumError(f"checksum mismatch: stored {stored:#018x}, computed {actual:#018x}")

    r = _Reader(data)
    r.pos = _HEADER.size
    perm = r.take("<u8", n).astype(np.int64)
    assignment = r.take("<u8", n).astype(np.int64)
    flags = np.unpackbits(r.take(np.uint8, (n + 7) // 8), count=n, bitorder="little").astype(bool)
    offsets = r.take("<u8", k + 1).astype(np.int64)
    sizes = np.diff(offsets)
    ct = r.take("<f8", int((sizes**2).sum())).astype(np.float64)
    bt = r.take("<f8", b * b).astype(np.float64).reshape(b, b)
    (e,) = r.take("<u8", 1)
    src = r.take("<u8", int(e)).astype(np.int64)
    dst = r.take("<u8", int(e)).astype(np.int64)
    w = r.take("<f8", int(e)).astype(np.float64)
    if r.pos != len(data) - 8:
        raise OracleFileError(f"{len(data) - 8 - r.pos} unexpected trailing bytes")

    inv = np.empty_like(perm)
    inv[perm] = np.arange(n)
    partition = Partition(int(k), assignment, flags, perm, inv)
    nboundary = partition.boundary_sizes.astype(np.int64)
    layout = Layout(offsets, nboundary)
    if layout.b != b:
        raise OracleFileError(f"boundary flags count {layout.b} boundary vertices, header says {b}")
    bg = Graph._from_arrays(int(b), src, dst, w, merge="error")
    global_of = np.concatenate(
        [np.arange(offsets[c], offsets[c] + nboundary[c]) for c in range(int(k))]
        or [np.empty(0, dtype=np.int64)]
    ).astype(np.int64)
    return Oracle(
        partition,
        layout,
        ComponentTables(layout, ct),
        BoundaryGraph(bg, global_of),
        BoundaryTables(layout, bt),
        place_components(int(k), min(workers, int(k))),
    )


def oracles_equal(a, b):
    """Field-by-field equality of everything the file stores, bit-exact."""
    def same(x, y):
        return x.shape == y.shape and x.tobytes() == y.tobytes()

    return (
        a.partition == b.partition
        and same(a.layout.offsets, b.layout.offsets)
        and same(a.component_tables.flat, b.component_tables.flat)
        and same(a.boundary_tables.matrix, b.boundary_tables.matrix)
        and a.boundary_graph.graph == b.boundary_graph.graph
        and same(a.boundary_graph.global_of, b.boundary_graph.global_of)
    )
