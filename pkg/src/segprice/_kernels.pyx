# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rent-floor and threshold-profile search.

Arithmetic order matches ``_kernels_py`` exactly so both backends return
bit-identical results.
"""

import numpy as np

from libc.math cimport INFINITY


cdef int _floor(const double[:, ::1] A, const Py_ssize_t[::1] idx, double[::1] u,
                double[::1] nxt, Py_ssize_t K, double tol) noexcept nogil:
    cdef Py_ssize_t r, k, j
    cdef double best, cand, ak
    for k in range(K):
        u[k] = 0.0
    for r in range(K + 1):
        for k in range(K):
            ak = A[k, idx[k]]
            best = 0.0
            for j in range(K):
                cand = u[j] + (A[k, idx[j]] - ak)
                if cand > best:
                    best = cand
            nxt[k] = best
        if r == K:
            for k in range(K):
                if nxt[k] > u[k] + tol:
                    return 0
            return 1
        for k in range(K):
            u[k] = nxt[k]
    return 1


def rent_floor_from(double[:, ::1] A, idx, double tol):
    """Minimal nonnegative rents for one profile; ``(u, feasible)``."""
    cdef Py_ssize_t K = A.shape[0]
    cdef Py_ssize_t[::1] ix = np.ascontiguousarray(idx, dtype=np.intp)
    u = np.zeros(K)
    nxt = np.zeros(K)
    cdef int ok = _floor(A, ix, u, nxt, K, tol)
    return u, bool(ok)


def search_profiles(double[:, ::1] A, double[:, ::1] R, double[::1] alpha, double tol):
    """Best threshold profile over all ``n**K`` index tuples, in lexicographic order.

    Returns ``(value, idx, u, n_feasible, n_infeasible)``.
    """
    cdef Py_ssize_t K = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t[::1] idx = np.zeros(K, dtype=np.intp)
    cdef Py_ssize_t[::1] best_idx = np.zeros(K, dtype=np.intp)
    cdef double[::1] u = np.zeros(K)
    cdef double[::1] nxt = np.zeros(K)
    cdef double[::1] best_u = np.zeros(K)
    cdef double best = -INFINITY, val
    cdef Py_ssize_t k, nf = 0, ni = 0
    cdef bint done = False
    with nogil:
        while not done:
            if _floor(A, idx, u, nxt, K, tol):
                nf += 1
                val = 0.0
                for k in range(K):
                    val = val + R[k, idx[k]]
                for k in range(K):
                    val = val - alpha[k] * u[k]
                if val > best:
                    best = val
                    for k in range(K):
                        best_idx[k] = idx[k]
                        best_u[k] = u[k]
            else:
                ni += 1
            k = K - 1
            while k >= 0:
                idx[k] += 1
                if idx[k] < n:
                    break
                idx[k] = 0
                k -= 1
            if k < 0:
                done = True
    return best, np.asarray(best_idx).copy(), np.asarray(best_u).copy(), nf, ni
