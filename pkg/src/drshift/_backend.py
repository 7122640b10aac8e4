"""Numerical backend: numba-compiled kernel loops with a numpy fallback.

The fallback is selected automatically when numba is missing, or forced by
setting the environment variable DRSHIFT_DISABLE_NUMBA=1. Both paths expose
identical signatures and produce identical results up to floating-point
reduction order.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("DRSHIFT_DISABLE_NUMBA", "").strip().lower() not in (
    "", "0", "false",
)

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled via DRSHIFT_DISABLE_NUMBA")
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

# family codes shared by both paths
GAUSSIAN = 0
LAPLACIAN = 1

# chunk size for the numpy fallback, keeps temporaries small
_CHUNK = 1024


if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _gram_nb(rows, cols, bw, family, out):
        n, m, d = rows.shape[0], cols.shape[0], rows.shape[1]
        inv = 1.0 / (2.0 * bw * bw)
        for i in prange(n):
            for j in range(m):
                s = 0.0
                for k in range(d):
                    diff = rows[i, k] - cols[j, k]
                    s += diff * diff
                if family == GAUSSIAN:
                    out[i, j] = np.exp(-s * inv)
                else:
                    out[i, j] = np.exp(-np.sqrt(s) / bw)

    @njit(parallel=True, cache=True)
    def _matvec_nb(queries, centers, coeffs, bw, family):
        nq, nc, d = queries.shape[0], centers.shape[0], queries.shape[1]
        inv = 1.0 / (2.0 * bw * bw)
        out = np.empty(nq)
        for i in prange(nq):
            acc = 0.0
            for j in range(nc):
                s = 0.0
                for k in range(d):
                    diff = queries[i, k] - centers[j, k]
                    s += diff * diff
                if family == GAUSSIAN:
                    acc += coeffs[j] * np.exp(-s * inv)
                else:
                    acc += coeffs[j] * np.exp(-np.sqrt(s) / bw)
            out[i] = acc
        return out

    @njit(parallel=True, cache=True)
    def _sym_gram_nb(points, sqrt_w, bw, family, shift, out):
        # out[i,j] = sw[i]*sw[j]*K(x_i,x_j), plus `shift` on the diagonal
        n, d = points.shape[0], points.shape[1]
        inv = 1.0 / (2.0 * bw * bw)
        for i in prange(n):
            for j in range(n):
                s = 0.0
                for k in range(d):
                    diff = points[i, k] - points[j, k]
                    s += diff * diff
                if family == GAUSSIAN:
                    v = np.exp(-s * inv)
                else:
                    v = np.exp(-np.sqrt(s) / bw)
                out[i, j] = sqrt_w[i] * sqrt_w[j] * v
            out[i, i] += shift


def _kernel_block(rows, cols, bw, family):
    d2 = ((rows[:, None, :] - cols[None, :, :]) ** 2).sum(axis=-1)
    if family == GAUSSIAN:
        return np.exp(-d2 / (2.0 * bw * bw))
    return np.exp(-np.sqrt(d2) / bw)


def gram_fill(rows, cols, bw, family, out):
    """Fill out[i, j] = K(rows_i, cols_j) for the given kernel family."""
    if HAS_NUMBA:
        _gram_nb(rows, cols, bw, family, out)
        return out
    for lo in range(0, rows.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, rows.shape[0])
        out[lo:hi] = _kernel_block(rows[lo:hi], cols, bw, family)
    return out


def expansion_matvec(queries, centers, coeffs, bw, family):
    """Sum_j coeffs[j] * K(query_i, centers_j) without materializing the
    full cross-kernel matrix."""
    if HAS_NUMBA:
        return _matvec_nb(queries, centers, coeffs, bw, family)
    out = np.empty(queries.shape[0])
    for lo in range(0, queries.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, queries.shape[0])
        out[lo:hi] = _kernel_block(queries[lo:hi], centers, bw, family) @ coeffs
    return out


def sym_gram_fill(points, sqrt_w, bw, family, shift, out):
    """Fill out = diag(sqrt_w) K diag(sqrt_w) + shift*I in one pass.

    Used by the direct ridge solver so the unweighted Gram matrix is never
    materialized at large n.
    """
    if HAS_NUMBA:
        _sym_gram_nb(points, sqrt_w, bw, family, shift, out)
        return out
    for lo in range(0, points.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, points.shape[0])
        block = _kernel_block(points[lo:hi], points, bw, family)
        block *= sqrt_w[lo:hi, None]
        block *= sqrt_w[None, :]
        out[lo:hi] = block
    idx = np.arange(points.shape[0])
    out[idx, idx] += shift
    return out
