# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the Chebyshev (SVD-free) path.

The hot loop is repeated application of ``alpha * A^T A - I`` to a dense
block inside the three-term Chebyshev recurrence. Both sparse products are
fused here so no scipy temporaries are allocated per step.
"""
import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t idx_t


cdef void _shifted_gram(const idx_t[::1] indptr, const idx_t[::1] indices,
                        const double[::1] data, const double[:, ::1] y,
                        double[:, ::1] tmp, double[:, ::1] out,
                        double alpha) noexcept nogil:
    # out = alpha * A^T (A y) - y
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1]
    cdef Py_ssize_t i, p, j, c
    cdef double a
    for i in range(n):
        for c in range(d):
            tmp[i, c] = 0.0
            out[i, c] = 0.0
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            a = data[p]
            for c in range(d):
                tmp[i, c] += a * y[j, c]
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            a = data[p]
            for c in range(d):
                out[j, c] += a * tmp[i, c]
    for i in range(n):
        for c in range(d):
            out[i, c] = alpha * out[i, c] - y[i, c]


def gram_apply(indptr, indices, data, y, double alpha=1.0):
    """``alpha * A^T A y`` for CSR ``A`` and dense ``y`` of shape ``(n, d)``."""
    cdef const idx_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const idx_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0], d = yv.shape[1]
    out = np.empty((n, d))
    tmp = np.empty((n, d))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] tv = tmp
    cdef Py_ssize_t i, c
    with nogil:
        _shifted_gram(ip, ix, dv, yv, tv, ov, alpha)
        for i in range(n):
            for c in range(d):
                ov[i, c] += yv[i, c]
    return out


def cheb_filter_apply(indptr, indices, data, x, coeffs, double alpha):
    """``sum_j coeffs[j] T_j(alpha * A^T A - I) x``."""
    cdef const idx_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const idx_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef const double[::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] xv = x
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1]
    cdef Py_ssize_t deg = cf.shape[0] - 1
    cdef Py_ssize_t i, c, j
    acc = np.empty((n, d))
    cdef double[:, ::1] av = acc
    cdef double[:, ::1] prev = x.copy()
    cdef double[:, ::1] cur = np.empty((n, d))
    cdef double[:, ::1] nxt = np.empty((n, d))
    cdef double[:, ::1] tmp = np.empty((n, d))
    cdef double[:, ::1] swap
    cdef double c0 = cf[0], cj
    with nogil:
        for i in range(n):
            for c in range(d):
                av[i, c] = c0 * xv[i, c]
        if deg >= 1:
            _shifted_gram(ip, ix, dv, prev, tmp, cur, alpha)
            cj = cf[1]
            for i in range(n):
                for c in range(d):
                    av[i, c] += cj * cur[i, c]
        for j in range(2, deg + 1):
            _shifted_gram(ip, ix, dv, cur, tmp, nxt, alpha)
            cj = cf[j]
            for i in range(n):
                for c in range(d):
                    nxt[i, c] = 2.0 * nxt[i, c] - prev[i, c]
                    av[i, c] += cj * nxt[i, c]
            swap = prev
            prev = cur
            cur = nxt
            nxt = swap
    return acc
