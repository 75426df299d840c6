"""Numpy fallback for the compiled kernels, vectorized over threshold profiles."""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 15


def _floor_batch(A, idx, tol):
    # idx: (P, K) candidate indices; returns (u, feasible)
    K = A.shape[0]
    rows = np.arange(K)
    own = A[rows, idx]                                   # (P, K): A[k, idx_k]
    cross = A[rows[None, :, None], idx[:, None, :]]      # (P, K, K): A[k, idx_j]
    gain = cross - own[:, :, None]
    u = np.zeros(idx.shape, dtype=float)
    for r in range(K + 1):
        nxt = np.maximum((u[:, None, :] + gain).max(axis=2), 0.0)
        if r == K:
            return u, ~np.any(nxt > u + tol, axis=1)
        u = nxt
    return u, np.ones(len(idx), dtype=bool)  # pragma: no cover


def rent_floor_from(A, idx, tol):
    """Minimal nonnegative rents for one profile; ``(u, feasible)``."""
    A = np.ascontiguousarray(A, dtype=float)
    u, ok = _floor_batch(A, np.asarray(idx, dtype=np.intp)[None, :], tol)
    return u[0], bool(ok[0])


def search_profiles(A, R, alpha, tol):
    """Best threshold profile over all ``n**K`` index tuples, in lexicographic order.

    Returns ``(value, idx, u, n_feasible, n_infeasible)``.
    """
    A = np.ascontiguousarray(A, dtype=float)
    R = np.ascontiguousarray(R, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    K, n = A.shape
    total = n ** K
    best, best_idx, best_u = -np.inf, np.zeros(K, dtype=np.intp), np.zeros(K)
    nf = 0
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(total, start + CHUNK))
        idx = np.stack(np.unravel_index(flat, (n,) * K), axis=1).astype(np.intp)
        u, ok = _floor_batch(A, idx, tol)
        nf += int(ok.sum())
        if not ok.any():
            continue
        val = np.zeros(len(flat))
        for k in range(K):
            val = val + R[k, idx[:, k]]
        for k in range(K):
            val = val - alpha[k] * u[:, k]
        val = np.where(ok, val, -np.inf)
        i = int(np.argmax(val))
        if val[i] > best:
            best, best_idx, best_u = float(val[i]), idx[i].copy(), u[i].copy()
    return best, best_idx, best_u, nf, total - nf
