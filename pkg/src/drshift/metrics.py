"""Monte-Carlo error norms, target risk, and log-log rate fitting."""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


def _eval(f, x):
    out = np.asarray(f(x), dtype=np.float64)
    if not np.isfinite(out).all():
        bad = np.asarray(x)[~np.isfinite(out)][0]
        raise ValueError(f"non-finite evaluation at point {bad!r}")
    return out


def mc_l2_error(f_est, f_true, sampler: Callable, n_mc: int, seed) -> float:
    """Monte-Carlo L2(rho) distance: sqrt of the mean squared gap over
    n_mc fresh draws from the sampler.

    sampler(n, seed) must return the draw; keep its seed independent of any
    training randomness.
    """
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    x = sampler(n_mc, seed)
    diff = _eval(f_est, x) - _eval(f_true, x)
    return float(np.sqrt(np.mean(diff * diff)))


def excess_target_risk(reg, spec, n_mc: int, seed) -> float:
    """Mean squared gap E_target[(f_hat - f_rho)^2], the expected target
    risk minus its noise floor."""
    from .scenarios import sample_target

    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    x = sample_target(spec, n_mc, seed)
    diff = _eval(reg, x) - _eval(spec.f_rho, x)
    return float(np.mean(diff * diff))


def h_norm_proxy(coeffs, gram) -> float:
    """Norm of an expansion in the kernel's native space: sqrt(c^T G c).

    Only meaningful when the function lies in the span of the Gram matrix's
    points; differences of two estimators on the same sample qualify,
    population regression functions generally do not.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    G = np.asarray(gram, dtype=np.float64)
    val = float(c @ (G @ c))
    return float(np.sqrt(max(val, 0.0)))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float


def fit_loglog_slope(ns: Sequence[float], errs: Sequence[float]) -> SlopeFit:
    """Ordinary least squares of ln(err) on ln(n)."""
    n = np.asarray(ns, dtype=np.float64)
    e = np.asarray(errs, dtype=np.float64)
    if n.shape != e.shape or n.ndim != 1 or n.size < 2:
        raise ValueError("need matching 1-d inputs with at least two entries")
    if (n <= 0).any() or (e <= 0).any():
        raise ValueError("log-log fitting needs strictly positive values")
    ln_n = np.log(n)
    ln_e = np.log(e)
    slope, intercept = np.polyfit(ln_n, ln_e, 1)
    pred = slope * ln_n + intercept
    ss_res = float(np.sum((ln_e - pred) ** 2))
    ss_tot = float(np.sum((ln_e - ln_e.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return SlopeFit(float(slope), float(intercept), float(r2))


@dataclass(frozen=True)
class ReplicationRecord:
    """One replication's errors; fields that a given experiment does not
    produce stay None and serialize as empty CSV cells."""

    scenario: str
    n_theta: int
    n_f: Optional[int]
    alpha: float
    iota: float
    m: float
    filter: str
    seed: int
    err_phi_rhoR: Optional[float] = None
    err_theta_rhoS: Optional[float] = None
    err_f_rhoT: Optional[float] = None
    excess_risk: Optional[float] = None


def aggregate_median_iqr(values: Sequence[float]) -> "tuple[float, float, float]":
    """(median, 25th percentile, 75th percentile)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot aggregate an empty collection")
    return (
        float(np.median(v)),
        float(np.percentile(v, 25)),
        float(np.percentile(v, 75)),
    )
