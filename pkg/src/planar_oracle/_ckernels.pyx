# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Every function here has a twin in ``_pykernels``."""

from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint64_t, uint8_t

import numpy as np

BACKEND = "cython"


# ---------------------------------------------------------------- Dijkstra

cdef struct Heap:
    # indexed binary min-heap keyed by (distance, vertex id); pos[v] = -1 when absent
    double* key
    int64_t* val
    int64_t* pos
    int64_t size


cdef inline bint _less(double ka, int64_t va, double kb, int64_t vb) noexcept nogil:
    return ka < kb or (ka == kb and va < vb)


cdef inline void _place(Heap* h, int64_t i, double key, int64_t val) noexcept nogil:
    h.key[i] = key
    h.val[i] = val
    h.pos[val] = i


cdef inline void _sift_up(Heap* h, int64_t i, double key, int64_t val) noexcept nogil:
    cdef int64_t parent
    while i > 0:
        parent = (i - 1) >> 1
        if not _less(key, val, h.key[parent], h.val[parent]):
            break
        _place(h, i, h.key[parent], h.val[parent])
        i = parent
    _place(h, i, key, val)


cdef inline void _push_or_decrease(Heap* h, double key, int64_t val) noexcept nogil:
    cdef int64_t i = h.pos[val]
    if i < 0:
        i = h.size
        h.size += 1
    _sift_up(h, i, key, val)


cdef inline void _pop(Heap* h) noexcept nogil:
    cdef int64_t i = 0
    cdef int64_t child
    cdef double key
    cdef int64_t val
    h.pos[h.val[0]] = -1
    h.size -= 1
    if h.size == 0:
        return
    key = h.key[h.size]
    val = h.val[h.size]
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _less(h.key[child + 1], h.val[child + 1],
                                        h.key[child], h.val[child]):
            child += 1
        if not _less(h.key[child], h.val[child], key, val):
            break
        _place(h, i, h.key[child], h.val[child])
        i = child
    _place(h, i, key, val)


cdef void _dijkstra(
    const int64_t* indptr,
    const int64_t* indices,
    const double* weights,
    int64_t n,
    int64_t source,
    int64_t target,
    double* dist,
    Heap* heap,
) noexcept nogil:
    cdef int64_t i, u, v, e
    cdef double d, nd
    for i in range(n):
        dist[i] = INFINITY
        heap.pos[i] = -1
    dist[source] = 0.0
    heap.size = 0
    _push_or_decrease(heap, 0.0, source)
    while heap.size > 0:
        d = heap.key[0]
        u = heap.val[0]
        _pop(heap)
        if u == target:
            break
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                _push_or_decrease(heap, nd, v)


cdef int _heap_alloc(Heap* heap, int64_t n) noexcept nogil:
    heap.key = <double*> malloc((n + 1) * sizeof(double))
    heap.val = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    heap.pos = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    heap.size = 0
    if heap.key == NULL or heap.val == NULL or heap.pos == NULL:
        free(heap.key)
        free(heap.val)
        free(heap.pos)
        return -1
    return 0


cdef void _heap_free(Heap* heap) noexcept nogil:
    free(heap.key)
    free(heap.val)
    free(heap.pos)


def dijkstra(const int64_t[::1] indptr, const int64_t[::1] indices,
             const double[::1] weights, int64_t source, int64_t target=-1):
    cdef int64_t n = indptr.shape[0] - 1
    cdef int64_t m = indices.shape[0]
    cdef Heap heap
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] dist = out
    if _heap_alloc(&heap, n) != 0:
        raise MemoryError
    with nogil:
        _dijkstra(&indptr[0], &indices[0] if m else NULL, &weights[0] if m else NULL,
                  n, source, target, &dist[0], &heap)
    _heap_free(&heap)
    return out


def dijkstra_rows(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const double[::1] weights, const int64_t[::1] sources,
                  double[:, ::1] out):
    cdef int64_t n = indptr.shape[0] - 1
    cdef int64_t m = indices.shape[0]
    cdef int64_t r
    cdef Heap heap
    if sources.shape[0] == 0 or n == 0:
        return
    if _heap_alloc(&heap, n) != 0:
        raise MemoryError
    with nogil:
        for r in range(sources.shape[0]):
            _dijkstra(&indptr[0], &indices[0] if m else NULL,
                      &weights[0] if m else NULL,
                      n, sources[r], -1, &out[r, 0], &heap)
    _heap_free(&heap)


# ---------------------------------------------------------- Floyd-Warshall

cdef void _relax_kfirst(double* D, int64_t n, int64_t ilo, int64_t ihi,
                        int64_t jlo, int64_t jhi, int64_t klo, int64_t khi) noexcept nogil:
    cdef int64_t i, j, k
    cdef double dik, s
    cdef double* row
    cdef double* krow
    for k in range(klo, khi):
        krow = D + k * n
        for i in range(ilo, ihi):
            dik = D[i * n + k]
            if dik == INFINITY:
                continue
            row = D + i * n
            for j in range(jlo, jhi):
                s = dik + krow[j]
                row[j] = s if s < row[j] else row[j]


cdef void _relax_ifirst(double* D, int64_t n, int64_t ilo, int64_t ihi,
                        int64_t jlo, int64_t jhi, int64_t klo, int64_t khi) noexcept nogil:
    # only valid when the k-panels are final for this round
    cdef int64_t i, j, k
    cdef double dik, s
    cdef double* row
    cdef double* krow
    for i in range(ilo, ihi):
        row = D + i * n
        for k in range(klo, khi):
            dik = row[k]
            if dik == INFINITY:
                continue
            krow = D + k * n
            for j in range(jlo, jhi):
                s = dik + krow[j]
                row[j] = s if s < row[j] else row[j]


def floyd_warshall(double[:, ::1] D, int64_t block=64):
    cdef int64_t n = D.shape[0]
    cdef int64_t klo, khi, ilo, ihi, jlo, jhi
    if n == 0:
        return
    if block < 1:
        raise ValueError("block size must be >= 1")
    cdef double* p = &D[0, 0]
    cdef int64_t nblocks = (n + block - 1) // block
    cdef int64_t kbi, ibi, jbi
    with nogil:
        for kbi in range(nblocks):
            klo = kbi * block
            khi = min(klo + block, n)
            _relax_kfirst(p, n, klo, khi, klo, khi, klo, khi)
            for jbi in range(nblocks):
                if jbi == kbi:
                    continue
                jlo = jbi * block
                jhi = min(jlo + block, n)
                _relax_kfirst(p, n, klo, khi, jlo, jhi, klo, khi)
                _relax_kfirst(p, n, jlo, jhi, klo, khi, klo, khi)
            for ibi in range(nblocks):
                if ibi == kbi:
                    continue
                ilo = ibi * block
                ihi = min(ilo + block, n)
                for jbi in range(nblocks):
                    if jbi == kbi:
                        continue
                    jlo = jbi * block
                    jhi = min(jlo + block, n)
                    _relax_ifirst(p, n, ilo, ihi, jlo, jhi, klo, khi)


# ------------------------------------------------------------------ queries

cdef struct Tables:
    const double* ct
    const double* bt
    const int64_t* comp_of
    const int64_t* offsets
    const int64_t* nboundary
    const int64_t* bg_offsets
    const int64_t* ct_start
    int64_t nbg


cdef void _to_boundary(Tables* t, int64_t u1, int64_t c2, int64_t b2lo, int64_t b2hi,
                       double* tmp) noexcept nogil:
    """tmp[b2 - b2lo] = min over b1 of dist_C1(u1, b1) + dist_BG(b1, b2)."""
    cdef int64_t c1 = t.comp_of[u1]
    cdef int64_t s1 = t.offsets[c1 + 1] - t.offsets[c1]
    cdef int64_t l1 = u1 - t.offsets[c1]
    cdef int64_t nb1 = t.nboundary[c1]
    cdef int64_t b1, b2
    cdef const double* row1 = t.ct + t.ct_start[c1] + l1 * s1
    cdef const double* btrow
    cdef double a, s
    for b2 in range(b2lo, b2hi):
        tmp[b2 - b2lo] = INFINITY
    for b1 in range(nb1):
        a = row1[b1]
        if a == INFINITY:
            continue
        btrow = t.bt + (t.bg_offsets[c1] + b1) * t.nbg + t.bg_offsets[c2]
        for b2 in range(b2lo, b2hi):
            s = a + btrow[b2]
            if s < tmp[b2 - b2lo]:
                tmp[b2 - b2lo] = s


cdef double _from_boundary(Tables* t, int64_t u2, int64_t b2lo, int64_t b2hi,
                           const double* tmp) noexcept nogil:
    """min over b2 of tmp[b2 - b2lo] + dist_C2(b2, u2), reading u2's column."""
    cdef int64_t c2 = t.comp_of[u2]
    cdef int64_t s2 = t.offsets[c2 + 1] - t.offsets[c2]
    cdef int64_t l2 = u2 - t.offsets[c2]
    cdef const double* ct2 = t.ct + t.ct_start[c2]
    cdef int64_t b2
    cdef double s
    cdef double best = INFINITY
    for b2 in range(b2lo, b2hi):
        s = tmp[b2 - b2lo] + ct2[b2 * s2 + l2]
        if s < best:
            best = s
    return best


cdef double _stitch(Tables* t, int64_t u1, int64_t u2, int64_t b2lo, int64_t b2hi,
                    double* tmp) noexcept nogil:
    """Boundary stitching restricted to b2 in [b2lo, b2hi); returns the partial min."""
    _to_boundary(t, u1, t.comp_of[u2], b2lo, b2hi, tmp)
    return _from_boundary(t, u2, b2lo, b2hi, tmp)


cdef inline double _finish(Tables* t, int64_t u1, int64_t u2, double best) noexcept nogil:
    cdef int64_t c1 = t.comp_of[u1]
    cdef int64_t s1, l1
    cdef double d
    if c1 == t.comp_of[u2]:
        s1 = t.offsets[c1 + 1] - t.offsets[c1]
        l1 = u1 - t.offsets[c1]
        d = t.ct[t.ct_start[c1] + l1 * s1 + (u2 - t.offsets[c1])]
        if d < best:
            best = d
    return best


cdef Tables _tables(const double[::1] ct, const double[:, ::1] bt,
                    const int64_t[::1] comp_of, const int64_t[::1] offsets,
                    const int64_t[::1] nboundary, const int64_t[::1] bg_offsets,
                    const int64_t[::1] ct_start):
    cdef Tables t
    t.ct = &ct[0]
    t.bt = &bt[0, 0] if bt.shape[0] > 0 and bt.shape[1] > 0 else NULL
    t.comp_of = &comp_of[0]
    t.offsets = &offsets[0]
    t.nboundary = &nboundary[0]
    t.bg_offsets = &bg_offsets[0]
    t.ct_start = &ct_start[0]
    t.nbg = bt.shape[1]
    return t


def query_partial(const double[::1] ct, const double[:, ::1] bt,
                  const int64_t[::1] comp_of, const int64_t[::1] offsets,
                  const int64_t[::1] nboundary, const int64_t[::1] bg_offsets,
                  const int64_t[::1] ct_start, int64_t u1, int64_t u2,
                  int64_t b2lo, int64_t b2hi):
    cdef Tables t = _tables(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start)
    cdef double best
    cdef double* tmp
    if b2hi <= b2lo:
        return INFINITY
    tmp = <double*> malloc((b2hi - b2lo) * sizeof(double))
    if tmp == NULL:
        raise MemoryError
    with nogil:
        best = _stitch(&t, u1, u2, b2lo, b2hi, tmp)
    free(tmp)
    return best


def query_one(const double[::1] ct, const double[:, ::1] bt,
              const int64_t[::1] comp_of, const int64_t[::1] offsets,
              const int64_t[::1] nboundary, const int64_t[::1] bg_offsets,
              const int64_t[::1] ct_start, int64_t u1, int64_t u2):
    cdef Tables t = _tables(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start)
    cdef int64_t nb2 = nboundary[comp_of[u2]]
    cdef double best = INFINITY
    cdef double* tmp = <double*> malloc((nb2 + 1) * sizeof(double))
    if tmp == NULL:
        raise MemoryError
    with nogil:
        if nb2 > 0:
            best = _stitch(&t, u1, u2, 0, nb2, tmp)
        best = _finish(&t, u1, u2, best)
    free(tmp)
    return best


def query_many(const double[::1] ct, const double[:, ::1] bt,
               const int64_t[::1] comp_of, const int64_t[::1] offsets,
               const int64_t[::1] nboundary, const int64_t[::1] bg_offsets,
               const int64_t[::1] ct_start, const int64_t[::1] u1s,
               const int64_t[::1] u2s, double[::1] out):
    """Answers for many pairs. Consecutive pairs sharing the source and the
    target's component reuse the source-to-boundary vector."""
    cdef Tables t = _tables(ct, bt, comp_of, offsets, nboundary, bg_offsets, ct_start)
    cdef int64_t q, c2, nb2, maxnb = 0
    cdef int64_t last_u1 = -1, last_c2 = -1
    cdef double best
    cdef double* tmp
    for q in range(nboundary.shape[0]):
        if nboundary[q] > maxnb:
            maxnb = nboundary[q]
    tmp = <double*> malloc((maxnb + 1) * sizeof(double))
    if tmp == NULL:
        raise MemoryError
    with nogil:
        for q in range(u1s.shape[0]):
            c2 = t.comp_of[u2s[q]]
            nb2 = t.nboundary[c2]
            best = INFINITY
            if nb2 > 0:
                if u1s[q] != last_u1 or c2 != last_c2:
                    _to_boundary(&t, u1s[q], c2, 0, nb2, tmp)
                    last_u1 = u1s[q]
                    last_c2 = c2
                best = _from_boundary(&t, u2s[q], 0, nb2, tmp)
            out[q] = _finish(&t, u1s[q], u2s[q], best)
    free(tmp)


def stitch_boundary(const double[::1] row_prefix, const double[:, ::1] block):
    """min over b1 of row_prefix[b1] + block[b1, b2], for every b2."""
    cdef int64_t nb1 = block.shape[0]
    cdef int64_t nb2 = block.shape[1]
    cdef int64_t b1, b2
    cdef double a, s
    res = np.full(nb2, np.inf)
    cdef double[::1] out = res
    with nogil:
        for b1 in range(nb1):
            a = row_prefix[b1]
            if a == INFINITY:
                continue
            for b2 in range(nb2):
                s = a + block[b1, b2]
                if s < out[b2]:
                    out[b2] = s
    return res


def min_plus_combine(const double[::1] a, const double[::1] b):
    cdef int64_t i
    cdef double best = INFINITY
    cdef double s
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"length mismatch: {a.shape[0]} != {b.shape[0]}")
    with nogil:
        for i in range(a.shape[0]):
            s = a[i] + b[i]
            if s < best:
                best = s
    return best


# ------------------------------------------------------------------- CRC-64

cdef uint64_t CRC_TABLE[256]


cdef void _init_crc_table() noexcept:
    cdef uint64_t poly = 0xC96C5795D7870F42ULL
    cdef uint64_t c
    cdef int i, j
    for i in range(256):
        c = i
        for j in range(8):
            if c & 1:
                c = (c >> 1) ^ poly
            else:
                c >>= 1
        CRC_TABLE[i] = c


_init_crc_table()


def crc64(const uint8_t[::1] data, uint64_t crc=0):
    """CRC-64/XZ, chainable: ``crc64(b, crc64(a)) == crc64(a + b)``."""
    cdef Py_ssize_t i
    cdef Py_ssize_t n = data.shape[0]
    cdef uint64_t c = ~crc
    with nogil:
        for i in range(n):
            c = CRC_TABLE[(c ^ data[i]) & 0xFF] ^ (c >> 8)
    return ~c
