"""Three-step unbounded density-ratio estimation.

Step 1 estimates the relative ratio phi = theta / (alpha * theta + 1 - alpha)
by spectral regularization of the empirical mixture operator. Step 2
truncates the estimate into [0, D / (alpha*D + 1 - alpha)]. Step 3 maps back
to the standard ratio theta = (1 - alpha) * phi / (1 - alpha * phi), which is
then bounded in [0, D]. D and the regularization strength mu follow
sample-size schedules.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .filters import FilterSpec, filter_values, make_filter
from .kernels import KernelSpec, as_points
from .operators import (
    KRR_DIRECT_MIN_N,
    KernelExpansion,
    apply_operator_function,
    build_operator,
    evaluate_expansion,
    krr_coeffs_direct,
)


def relative_of_standard(theta_value, alpha: float):
    """phi = theta / (alpha * theta + 1 - alpha), bounded in [0, 1/alpha)."""
    _check_alpha(alpha)
    th = np.asarray(theta_value, dtype=np.float64)
    if (th < 0).any():
        raise ValueError("standard ratio values must be non-negative")
    with np.errstate(invalid="ignore"):
        # inf / inf in the dead branch of the where
        out = np.where(
            np.isinf(th), 1.0 / alpha, th / (alpha * th + (1.0 - alpha))
        )
    return out if out.ndim else float(out)


def to_standard_ratio(phi_value, alpha: float):
    """Inverse transform theta = (1 - alpha) * phi / (1 - alpha * phi).

    Requires alpha * phi < 1; truncated inputs always satisfy this.
    """
    _check_alpha(alpha)
    ph = np.asarray(phi_value, dtype=np.float64)
    if (alpha * ph >= 1.0).any():
        raise ValueError("phi is outside the invertible range [0, 1/alpha)")
    out = (1.0 - alpha) * ph / (1.0 - alpha * ph)
    return out if out.ndim else float(out)


def truncation_cap(alpha: float, D: float) -> float:
    """The relative-scale ceiling D / (alpha*D + 1 - alpha), strictly below
    1/alpha."""
    return D / (alpha * D + (1.0 - alpha))


def truncate_relative(value, alpha: float, D: float):
    """Clip a raw relative-ratio value into [0, truncation_cap(alpha, D)]."""
    _check_alpha(alpha)
    if not (np.isfinite(D) and D > 0):
        raise ValueError("truncation threshold D must be positive")
    out = np.clip(np.asarray(value, dtype=np.float64), 0.0, truncation_cap(alpha, D))
    return out if out.ndim else float(out)


def schedule_mu(n_theta: int, iota: float) -> float:
    """Regularization schedule mu = n_theta^(-1/(2*iota + 1))."""
    if n_theta < 1:
        raise ValueError("n_theta must be >= 1")
    if iota < 0.5:
        raise ValueError("smoothness index iota must be >= 1/2")
    return float(n_theta) ** (-1.0 / (2.0 * iota + 1.0))


def schedule_truncation(n_theta: int, iota: float, m: float) -> float:
    """Truncation schedule D = n_theta^nu with nu = (1/m) * 2*iota/(2*iota+1).

    m is the moment order controlling the ratio's tail; values at or below 2
    are outside the admissible range.
    """
    if n_theta < 1:
        raise ValueError("n_theta must be >= 1")
    if iota < 0.5:
        raise ValueError("smoothness index iota must be >= 1/2")
    if not m > 2:
        raise ValueError("moment order m must exceed 2")
    nu = (1.0 / m) * (2.0 * iota / (2.0 * iota + 1.0))
    return float(n_theta) ** nu


def _check_alpha(alpha: float):
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly between 0 and 1")


@dataclass(frozen=True)
class RelativeRatioEstimate:
    """Kernel expansion for the raw relative-ratio estimate."""

    expansion: KernelExpansion
    alpha: float
    mu: float
    n_theta: int

    def phi_raw(self, queries) -> np.ndarray:
        return evaluate_expansion(self.expansion, queries)


@dataclass(frozen=True)
class DensityRatioEstimate:
    """Relative-ratio estimate plus truncation threshold; evaluates the
    truncated relative ratio and the transformed standard ratio."""

    base: RelativeRatioEstimate
    D: float

    @property
    def alpha(self) -> float:
        return self.base.alpha

    @property
    def cap(self) -> float:
        return truncation_cap(self.base.alpha, self.D)

    def phi_raw(self, queries) -> np.ndarray:
        return self.base.phi_raw(queries)

    def phi(self, queries) -> np.ndarray:
        return truncate_relative(self.base.phi_raw(queries), self.base.alpha, self.D)

    def theta(self, queries) -> np.ndarray:
        # the inverse transform of the capped phi can exceed D by a few ulp
        # when alpha * cap is close to 1, so clamp to keep theta <= D exact
        return np.minimum(to_standard_ratio(self.phi(queries), self.base.alpha), self.D)

    def weight_fn(self):
        """The estimated standard ratio as a plain callable, suitable as an
        importance-weight source."""
        return self.theta


def estimate_relative_ratio(
    source_pts,
    target_pts,
    alpha: float,
    kernel: KernelSpec,
    filt: FilterSpec,
    solver: str = "auto",
) -> RelativeRatioEstimate:
    """Relative-ratio estimate from equal-size unlabeled samples.

    Builds the mixture operator on the stacked sample (source block first)
    with weights (1-alpha)/n and alpha/n, applies the filter to the
    embedding of the target empirical measure, and returns the resulting
    kernel expansion.

    solver: "auto" picks an in-place Cholesky solve for the ridge filter on
    large samples and the eigendecomposition route otherwise; "eig" and
    "direct" force a route ("direct" is ridge-only).
    """
    src = as_points(source_pts)
    tgt = as_points(target_pts)
    n = src.shape[0]
    if n == 0:
        raise ValueError("need at least one sample per distribution")
    if tgt.shape[0] != n:
        raise ValueError(
            f"source and target sample sizes must match, got {n} and {tgt.shape[0]}"
        )
    if src.shape[1] != tgt.shape[1]:
        raise ValueError("source and target point dimensions must match")
    _check_alpha(alpha)
    if solver not in ("auto", "eig", "direct"):
        raise ValueError("solver must be one of auto, eig, direct")

    combined = np.vstack([src, tgt])
    weights = np.concatenate(
        [np.full(n, (1.0 - alpha) / n), np.full(n, alpha / n)]
    )
    # coefficients of the target-measure embedding: zero on the source block
    b = np.concatenate([np.zeros(n), np.full(n, 1.0 / n)])

    use_direct = solver == "direct" or (
        solver == "auto" and filt.family == "krr" and combined.shape[0] >= KRR_DIRECT_MIN_N
    )
    if use_direct:
        if filt.family != "krr":
            raise ValueError("the direct solver applies to the ridge filter only")
        coeffs = krr_coeffs_direct(combined, weights, filt.lam, kernel, b)
    else:
        rep = build_operator(combined, weights, kernel)
        coeffs = apply_operator_function(rep, lambda t: filter_values(filt, t), b)
    exp = KernelExpansion(points=combined, coeffs=coeffs, kernel=kernel)
    return RelativeRatioEstimate(expansion=exp, alpha=alpha, mu=filt.lam, n_theta=n)


def estimate_density_ratio(
    source_pts,
    target_pts,
    alpha: float,
    kernel: KernelSpec,
    filter_family: str = "krr",
    iota: float = 0.5,
    m: float = 10.0,
    tau: Optional[float] = None,
    lam_override: Optional[float] = None,
    solver: str = "auto",
) -> DensityRatioEstimate:
    """Full pipeline: schedule mu and D from the sample size, estimate the
    relative ratio, and wrap it with truncation and inverse transform."""
    n = as_points(source_pts).shape[0]
    mu = schedule_mu(n, iota) if lam_override is None else float(lam_override)
    if mu <= 0:
        raise ValueError("regularization strength must be positive")
    D = schedule_truncation(n, iota, m)
    filt = make_filter(filter_family, mu, tau)
    base = estimate_relative_ratio(source_pts, target_pts, alpha, kernel, filt, solver)
    return DensityRatioEstimate(base=base, D=D)
