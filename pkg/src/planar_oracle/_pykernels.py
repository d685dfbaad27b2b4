"""Pure-Python/numpy versions of the compiled kernels in ``_ckernels.pyx``.

Signatures and results match the compiled module exactly; only speed differs.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

BACKEND = "python"


def dijkstra(indptr, indices, weights, source, target=-1):
    n = len(indptr) - 1
    dist = [math.inf] * n
    dist[source] = 0.0
    ptr = indptr.tolist()
    nbr = indices.tolist()
    wt = weights.tolist()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == target:
            break
        for e in range(ptr[u], ptr[u + 1]):
            v = nbr[e]
            nd = d + wt[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.array(dist, dtype=np.float64)


def dijkstra_rows(indptr, indices, weights, sources, out):
    for r, s in enumerate(sources):
        out[r, :] = dijkstra(indptr, indices, weights, int(s))


def floyd_warshall(D, block=64):
    n = D.shape[0]
    if block < 1:
        raise ValueError("block size must be >= 1")
    for kb in range(0, n, block):
        ks = slice(kb, min(kb + block, n))
        # diagonal block, then the row and column panels, k-major
        for k in range(ks.start, ks.stop):
            np.minimum(D[ks, ks], D[ks, k, None] + D[None, k, ks], out=D[ks, ks])
        for k in range(ks.start, ks.stop):
            np.minimum(D[ks, :], D[ks, k, None] + D[None, k, :], out=D[ks, :])
            np.minimum(D[:, ks], D[:, k, None] + D[None, k, ks], out=D[:, ks])
        # remainder: every input panel is final for this round
        col = D[:, ks].copy()
        row = D[ks, :].copy()
        for i0 in range(0, n, block):
            rs = slice(i0, min(i0 + block, n))
            cand = (col[rs, :, None] + row[None, :, :]).min(axis=1)
            np.minimum(D[rs, :], cand, out=D[rs, :])


def _stitch(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start, u1, u2, b2lo, b2hi):
    c1 = int(comp_of[u1])
    c2 = int(comp_of[u2])
    s1 = int(offsets[c1 + 1] - offsets[c1])
    s2 = int(offsets[c2 + 1] - offsets[c2])
    l1 = u1 - int(offsets[c1])
    l2 = u2 - int(offsets[c2])
    nb1 = int(nboundary[c1])
    start1 = int(ct_start[c1]) + l1 * s1
    row1 = ct[start1:start1 + nb1]
    g1 = int(bg_offsets[c1])
    g2 = int(bg_offsets[c2])
    block = bt[g1:g1 + nb1, g2 + b2lo:g2 + b2hi]
    tmp = stitch_boundary(row1, block)
    ct2 = ct[int(ct_start[c2]):int(ct_start[c2 + 1])].reshape(s2, s2)
    return min_plus_combine(tmp, np.ascontiguousarray(ct2[b2lo:b2hi, l2]))


def _finish(ct, comp_of, offsets, ct_start, u1, u2, best):
    c1 = int(comp_of[u1])
    if c1 == int(comp_of[u2]):
        s1 = int(offsets[c1 + 1] - offsets[c1])
        l1 = u1 - int(offsets[c1])
        d = float(ct[int(ct_start[c1]) + l1 * s1 + u2 - int(offsets[c1])])
        if d < best:
            best = d
    return best


def query_partial(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start, u1, u2, b2lo, b2hi):
    if b2hi <= b2lo:
        return math.inf
    return _stitch(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start,
                   int(u1), int(u2), int(b2lo), int(b2hi))


def query_one(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start, u1, u2):
    u1, u2 = int(u1), int(u2)
    nb2 = int(nboundary[comp_of[u2]])
    best = math.inf
    if nb2 > 0:
        best = _stitch(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start, u1, u2, 0, nb2)
    return _finish(ct, comp_of, offsets, ct_start, u1, u2, best)


def query_many(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start, u1s, u2s, out):
    """Answers for many pairs. Consecutive pairs sharing the source and the
    target's component reuse the source-to-boundary vector."""
    last = None
    via = None
    for q in range(len(u1s)):
        u1, u2 = int(u1s[q]), int(u2s[q])
        c1, c2 = int(comp_of[u1]), int(comp_of[u2])
        nb2 = int(nboundary[c2])
        best = math.inf
        if nb2 > 0:
            if (u1, c2) != last:
                s1 = int(offsets[c1 + 1] - offsets[c1])
                nb1 = int(nboundary[c1])
                start1 = int(ct_start[c1]) + (u1 - int(offsets[c1])) * s1
                g1, g2 = int(bg_offsets[c1]), int(bg_offsets[c2])
                via = stitch_boundary(ct[start1:start1 + nb1], bt[g1:g1 + nb1, g2:g2 + nb2])
                last = (u1, c2)
            s2 = int(offsets[c2 + 1] - offsets[c2])
            ct2 = ct[int(ct_start[c2]):int(ct_start[c2 + 1])].reshape(s2, s2)
            best = min_plus_combine(via, np.ascontiguousarray(ct2[:nb2, u2 - int(offsets[c2])]))
        out[q] = _finish(ct, comp_of, offsets, ct_start, u1, u2, best)


def stitch_boundary(row_prefix, block):
    if block.shape[0] == 0:
        return np.full(block.shape[1], np.inf)
    return (row_prefix[:, None] + block).min(axis=0)


def min_plus_combine(a, b):
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    if len(a) == 0:
        return math.inf
    return float(np.min(np.asarray(a) + np.asarray(b)))


def _make_crc_table():
    poly = 0xC96C5795D7870F42
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ poly if c & 1 else c >> 1
        table.append(c)
    return table


_CRC_TABLE = _make_crc_table()
_MASK = (1 << 64) - 1


def crc64(data, crc=0):
    """CRC-64/XZ, chainable: ``crc64(b, crc64(a)) == crc64(a + b)``."""
    c = ~crc & _MASK
    table = _CRC_TABLE
    for byte in bytes(data):
        c = table[(c ^ byte) & 0xFF] ^ (c >> 8)
    return ~c & _MASK
