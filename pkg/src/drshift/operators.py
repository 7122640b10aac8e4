"""Weighted empirical integral operators as symmetrized PSD matrices.

A weighted sample (x_k, w_k) realizes the operator
    L f = sum_k w_k f(x_k) K(., x_k).
On the coefficient vector c of a kernel expansion f = sum_k c_k K(., x_k)
the operator acts as c -> W G c with G the Gram matrix and W = diag(w).
All spectral computations run on the symmetrization B = W^(1/2) G W^(1/2),
which shares the nonzero spectrum of W G and admits a stable
eigendecomposition.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _backend
from .kernels import KernelSpec, as_points

# eigenvalues below EIG_CLIP_REL * lambda_max are clipped to zero
EIG_CLIP_REL = 1e-10

# combined sample size above which the ridge filter bypasses the
# eigendecomposition in favor of an in-place Cholesky solve
KRR_DIRECT_MIN_N = 1500


@dataclass(frozen=True)
class KernelExpansion:
    """f(x) = sum_k coeffs_k K(x, points_k)."""

    points: np.ndarray
    coeffs: np.ndarray
    kernel: KernelSpec

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))
        object.__setattr__(
            self, "coeffs", np.ascontiguousarray(np.asarray(self.coeffs, dtype=np.float64))
        )
        if self.coeffs.ndim != 1 or self.coeffs.shape[0] != self.points.shape[0]:
            raise ValueError("coeffs must be a vector matching the number of points")
        if not np.isfinite(self.coeffs).all():
            raise ValueError("expansion coefficients must be finite")

    def __call__(self, queries):
        return evaluate_expansion(self, queries)


@dataclass(frozen=True)
class OperatorRep:
    points: np.ndarray
    weights: np.ndarray
    kernel: KernelSpec
    gram: np.ndarray
    sym: np.ndarray
    eigvals: np.ndarray  # descending, clipped at zero
    eigvecs: np.ndarray  # orthonormal columns matching eigvals

    @property
    def sqrt_w(self) -> np.ndarray:
        return np.sqrt(self.weights)

    @property
    def lam_max(self) -> float:
        return float(self.eigvals[0]) if self.eigvals.size else 0.0


def build_operator(points, weights, kernel: KernelSpec) -> OperatorRep:
    """Construct the finite-sample operator representation.

    weights must be non-negative and finite; zero weights are legal and leave
    the spectrum untouched.
    """
    pts = as_points(points)
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != pts.shape[0]:
        raise ValueError("weights must be a vector with one entry per point")
    if not np.isfinite(w).all():
        raise ValueError("weights must be finite")
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")

    from .kernels import gram as gram_fn

    G = gram_fn(kernel, pts, pts)
    sw = np.sqrt(w)
    B = sw[:, None] * G * sw[None, :]
    B = 0.5 * (B + B.T)
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    vals = clip_eigenvalues(vals)
    return OperatorRep(pts, w, kernel, G, B, vals, np.ascontiguousarray(vecs))


def clip_eigenvalues(vals: np.ndarray) -> np.ndarray:
    lam_max = max(float(vals.max(initial=0.0)), 0.0)
    out = vals.copy()
    out[out < EIG_CLIP_REL * lam_max] = 0.0
    return out


def _eval_g(g: Callable, vals: np.ndarray) -> np.ndarray:
    gv = np.asarray(g(vals), dtype=np.float64)
    if gv.ndim == 0:
        gv = np.full(vals.shape, float(gv))
    if gv.shape != vals.shape:
        # scalar-only callable, evaluate pointwise
        gv = np.array([float(g(t)) for t in vals])
    return gv


def apply_operator_function(rep: OperatorRep, g: Callable, b) -> np.ndarray:
    """Coefficients of g(L) applied to the expansion with coefficients b.

    Computes c = W^(1/2) V g(D) V^T W^(1/2)+ b, where B = V D V^T and + is
    the entrywise pseudo-inverse. Exact whenever b lies in the range of W,
    which holds for every pipeline in this package (b always carries a
    factor of W).
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (rep.points.shape[0],):
        raise ValueError("coefficient vector length must match the sample size")
    gv = _eval_g(g, rep.eigvals)
    bad = ~np.isfinite(gv)
    if bad.any():
        t = rep.eigvals[bad][0]
        raise ValueError(f"filter function is not finite at eigenvalue {t!r}")
    sw = rep.sqrt_w
    inv_sw = np.zeros_like(sw)
    nz = sw > 0
    inv_sw[nz] = 1.0 / sw[nz]
    z = rep.eigvecs.T @ (inv_sw * b)
    return sw * (rep.eigvecs @ (gv * z))


def operator_coeff_action(rep: OperatorRep, c) -> np.ndarray:
    """The represented operator acting on expansion coefficients: c -> W G c."""
    c = np.asarray(c, dtype=np.float64)
    return rep.weights * (rep.gram @ c)


def evaluate_expansion(exp: KernelExpansion, queries) -> np.ndarray:
    """Evaluate sum_k c_k K(q_i, points_k) for each query point."""
    q = as_points(queries)
    if q.shape[1] != exp.points.shape[1]:
        raise ValueError(
            f"query dimension {q.shape[1]} does not match expansion dimension "
            f"{exp.points.shape[1]}"
        )
    return _backend.expansion_matvec(
        q, exp.points, exp.coeffs, exp.kernel.bandwidth, exp.kernel._code
    )


def krr_coeffs_direct(points, weights, lam: float, kernel: KernelSpec, b) -> np.ndarray:
    """Ridge-filter coefficients via an in-place Cholesky solve.

    Mathematically identical to apply_operator_function with g(t) = 1/(t+lam):
    c = W^(1/2) (B + lam I)^(-1) W^(1/2)+ b. Builds B fused (the plain Gram
    matrix is never materialized) and factors it in place, so peak memory is
    one n x n array. Used for large samples where the O(n^3) in
    the eigendecomposition dominates; equivalence with the spectral route is
    covered by tests.
    """
    pts = as_points(points)
    w = np.asarray(weights, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = pts.shape[0]
    if w.shape != (n,) or b.shape != (n,):
        raise ValueError("weights and coefficient vector must match the sample size")
    if (w < 0).any() or not np.isfinite(w).all():
        raise ValueError("weights must be non-negative and finite")
    if not (np.isfinite(lam) and lam > 0):
        raise ValueError("lam must be positive")
    sw = np.sqrt(w)
    rhs = np.zeros(n)
    nz = sw > 0
    rhs[nz] = b[nz] / sw[nz]

    B = np.empty((n, n))
    _backend.sym_gram_fill(pts, sw, kernel.bandwidth, kernel._code, lam, B)
    # B.T is an F-contiguous view of the same (symmetric) matrix, so LAPACK
    # factors in place without a second n x n allocation
    factor = cho_factor(B.T, lower=False, overwrite_a=True, check_finite=False)
    z = cho_solve(factor, rhs, check_finite=False)
    del B, factor
    return sw * z
