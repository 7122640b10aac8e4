"""Bounded Mercer kernels and Gram-matrix computation."""

from dataclasses import dataclass

import numpy as np

from . import _backend

_FAMILIES = {"gaussian": _backend.GAUSSIAN, "laplacian": _backend.LAPLACIAN}


@dataclass(frozen=True)
class KernelSpec:
    """A bounded kernel K with sup_x K(x, x) = kappa_sq.

    Both shipped families are normalized, K(x, x) = 1, so kappa_sq = 1.
    """

    family: str = "gaussian"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family: {self.family!r}")
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError("bandwidth must be a positive finite real")

    @property
    def kappa_sq(self) -> float:
        return 1.0

    @property
    def _code(self) -> int:
        return _FAMILIES[self.family]


def kappa_sq(kernel: KernelSpec) -> float:
    """Uniform diagonal bound sup_x K(x, x) for the kernel family."""
    return kernel.kappa_sq


def as_points(x) -> np.ndarray:
    """Normalize point input to a C-contiguous float64 array of shape (n, d).

    Accepts scalars, 1-d arrays (interpreted as n points in 1 dimension) and
    2-d arrays of row vectors.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ValueError(f"points must be at most 2-dimensional, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


def gram(kernel: KernelSpec, rows, cols) -> np.ndarray:
    """Kernel matrix with entry (i, j) = K(rows_i, cols_j).

    Raises ValueError on dimension mismatch or non-finite coordinates.
    """
    r = as_points(rows)
    c = as_points(cols)
    if r.shape[1] != c.shape[1]:
        raise ValueError(
            f"point dimension mismatch: rows have d={r.shape[1]}, cols d={c.shape[1]}"
        )
    if not (np.isfinite(r).all() and np.isfinite(c).all()):
        raise ValueError("points must be finite")
    out = np.empty((r.shape[0], c.shape[0]))
    _backend.gram_fill(r, c, kernel.bandwidth, kernel._code, out)
    return out
