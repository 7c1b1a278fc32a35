# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled successive-cancellation kernel.

Same contract as ``_sc_py.sc_decode_batch``; decisions are bit-identical.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _rescale(double* v, Py_ssize_t q) noexcept nogil:
    cdef double mx = v[0]
    cdef Py_ssize_t u
    for u in range(1, q):
        if v[u] > mx:
            mx = v[u]
    if mx > 0:
        for u in range(q):
            v[u] = v[u] / mx


cdef struct Ctx:
    Py_ssize_t q
    const long long* free_mask
    const long long* frozen
    const long long* genie      # NULL for standalone decoding
    long long* decisions
    double* post                # NULL unless posteriors are requested


cdef void _leaf(Ctx* c, double* L, Py_ssize_t i, long long* x) noexcept nogil:
    cdef Py_ssize_t q = c.q, u
    cdef long long fixed = (~c.free_mask[i]) & (q - 1)
    cdef long long want = c.frozen[i] & fixed
    cdef long long best = -1
    cdef double best_val = -1.0, tot = 0.0
    for u in range(q):
        if (u & fixed) == want and L[u] > best_val:
            best_val = L[u]
            best = u
    c.decisions[i] = best
    if c.post != NULL:
        for u in range(q):
            tot += L[u]
        for u in range(q):
            c.post[i * q + u] = L[u] / tot if tot > 0 else 0.0
    if c.genie != NULL:
        x[0] = c.genie[i]
    else:
        x[0] = best


cdef void _rec(Ctx* c, double* L, Py_ssize_t n, Py_ssize_t lo,
               double* work, long long* x) noexcept nogil:
    cdef Py_ssize_t q = c.q
    cdef Py_ssize_t half, j, u1, u2
    cdef double* L1
    cdef double* L2
    cdef double* child
    cdef double acc
    if n == 1:
        _leaf(c, L, lo, x)
        return
    half = n // 2
    L1 = L
    L2 = L + half * q
    child = work
    for j in range(half):
        for u1 in range(q):
            acc = 0.0
            for u2 in range(q):
                acc = acc + L1[j * q + (u1 ^ u2)] * L2[j * q + u2]
            child[j * q + u1] = acc
        _rescale(child + j * q, q)
    _rec(c, child, half, lo, work + half * q, x)
    for j in range(half):
        for u2 in range(q):
            child[j * q + u2] = L1[j * q + (x[j] ^ u2)] * L2[j * q + u2]
        _rescale(child + j * q, q)
    _rec(c, child, half, lo + half, work + half * q, x + half)
    for j in range(half):
        x[j] = x[j] ^ x[half + j]


def sc_decode_batch(lik, free_mask, frozen, genie=None, want_post=False):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] L = np.ascontiguousarray(lik, dtype=np.float64)
    cdef Py_ssize_t T = L.shape[0], n = L.shape[1], q = L.shape[2], t
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fm = np.ascontiguousarray(free_mask, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fz = np.ascontiguousarray(frozen, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] g
    cdef cnp.ndarray[cnp.int64_t, ndim=2] dec = np.zeros((T, n), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] post
    cdef cnp.ndarray[cnp.float64_t, ndim=2] root = np.empty((n, q), dtype=np.float64)
    cdef Ctx c
    cdef double* work
    cdef long long* x
    if n & (n - 1):
        raise ValueError("block length must be a power of two")
    if genie is not None:
        g = np.ascontiguousarray(genie, dtype=np.int64)
    if want_post:
        post = np.zeros((T, n, q), dtype=np.float64)
    c.q = q
    c.free_mask = <const long long*> fm.data
    c.frozen = <const long long*> fz.data
    work = <double*> malloc(max(n, 1) * q * sizeof(double))
    x = <long long*> malloc(max(n, 1) * sizeof(long long))
    if work == NULL or x == NULL:
        free(work)
        free(x)
        raise MemoryError()
    try:
        for t in range(T):
            root[:, :] = L[t]
            c.genie = <const long long*> &g[t, 0] if genie is not None else NULL
            c.decisions = <long long*> &dec[t, 0]
            c.post = <double*> &post[t, 0, 0] if want_post else NULL
            with nogil:
                _rec(&c, <double*> root.data, n, 0, work, x)
    finally:
        free(work)
        free(x)
    if want_post:
        return dec, post
    return dec


def polar_transform_bits(u):
    cdef Py_ssize_t rows, n, r, b, j, h
    cdef long long[:, ::1] x
    arr = np.array(u, dtype=np.int64, copy=True)
    shape = arr.shape
    flat = np.ascontiguousarray(arr.reshape(-1, shape[len(shape) - 1]))
    x = flat
    rows = x.shape[0]
    n = x.shape[1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    with nogil:
        while h < n:
            for r in range(rows):
                b = 0
                while b < n:
                    for j in range(b, b + h):
                        x[r, j] = x[r, j] ^ x[r, j + h]
                    b += 2 * h
            h *= 2
    return flat.reshape(shape)
