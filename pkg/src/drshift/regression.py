"""Importance-weighted spectral regression.

The estimator applies a spectral filter to the importance-weighted empirical
covariance operator and the weighted label embedding: with weights
u_i = theta_hat(x_i) / n_f, coefficients are
c = U^(1/2) g_lam(B) U^(1/2) y where B = U^(1/2) G U^(1/2). Plugging the
estimated density ratio into the weights makes the weighted risk track the
target-distribution risk under covariate shift.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .filters import FilterSpec, filter_values
from .kernels import KernelSpec, as_points
from .operators import (
    KRR_DIRECT_MIN_N,
    KernelExpansion,
    apply_operator_function,
    build_operator,
    evaluate_expansion,
    krr_coeffs_direct,
)


@dataclass(frozen=True)
class LabeledSample:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xs", as_points(self.xs))
        object.__setattr__(
            self, "ys", np.ascontiguousarray(np.asarray(self.ys, dtype=np.float64))
        )
        if self.ys.ndim != 1 or self.ys.shape[0] != self.xs.shape[0]:
            raise ValueError("xs and ys must have matching lengths")
        if not (np.isfinite(self.xs).all() and np.isfinite(self.ys).all()):
            raise ValueError("labeled data must be finite")

    @property
    def n(self) -> int:
        return self.xs.shape[0]


@dataclass(frozen=True)
class Regressor:
    expansion: KernelExpansion
    lam: float
    filter: FilterSpec
    weights_used: np.ndarray  # theta_hat(x_i), before the 1/n_f scaling

    def predict(self, queries) -> np.ndarray:
        return evaluate_expansion(self.expansion, queries)

    def __call__(self, queries) -> np.ndarray:
        return self.predict(queries)


def fit_iw_spectral(
    data: LabeledSample,
    weight_fn: Callable,
    kernel: KernelSpec,
    filt: FilterSpec,
    solver: str = "auto",
) -> Regressor:
    """Fit the weighted spectral estimator.

    weight_fn maps the point array to non-negative bounded weights
    theta_hat(x_i); pass lambda x: np.ones(len(x)) for the unweighted
    estimator. Points with zero weight receive coefficient exactly zero.
    """
    th = np.asarray(weight_fn(data.xs), dtype=np.float64)
    if th.shape != (data.n,):
        raise ValueError("weight_fn must return one value per labeled point")
    if not np.isfinite(th).all():
        raise ValueError("importance weights must be finite")
    if (th < 0).any():
        raise ValueError("importance weights must be non-negative")
    if solver not in ("auto", "eig", "direct"):
        raise ValueError("solver must be one of auto, eig, direct")

    u = th / data.n
    b = u * data.ys  # embedding of the weighted labels, in range(U) by construction
    use_direct = solver == "direct" or (
        solver == "auto" and filt.family == "krr" and data.n >= KRR_DIRECT_MIN_N
    )
    if use_direct:
        if filt.family != "krr":
            raise ValueError("the direct solver applies to the ridge filter only")
        coeffs = krr_coeffs_direct(data.xs, u, filt.lam, kernel, b)
    else:
        rep = build_operator(data.xs, u, kernel)
        coeffs = apply_operator_function(rep, lambda t: filter_values(filt, t), b)
    exp = KernelExpansion(points=data.xs, coeffs=coeffs, kernel=kernel)
    return Regressor(expansion=exp, lam=filt.lam, filter=filt, weights_used=th)


def schedule_lambda(n_f: int, s: float) -> float:
    """Regularization schedule lam = n_f^(-s)."""
    if n_f < 1:
        raise ValueError("n_f must be >= 1")
    if s <= 0:
        raise ValueError("exponent s must be positive")
    return float(n_f) ** (-s)


def select_exponent_s(beta: float, iota: float, r: float, epsilon: float) -> float:
    """Admissible lambda-schedule exponent for the coupling n_theta = n_f^beta.

    Case analysis over the unlabeled-to-labeled budget beta and the
    smoothness indices: with plentiful unlabeled data
    (beta >= 1 + 1/(2*iota)) the optimal exponent 1/(2r+1) - epsilon is
    always admissible; otherwise the ratio-estimation error constrains s,
    with three regimes in r split at 1/2 + T and 1/2 + 1/T where
    T = (1 + 1/(2*iota)) / beta - 1.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    if iota < 0.5:
        raise ValueError("iota must be >= 1/2")
    if r < 0.5:
        raise ValueError("r must be >= 1/2")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    if beta >= 1.0 + 1.0 / (2.0 * iota):
        s = 1.0 / (2.0 * r + 1.0) - epsilon
    else:
        T = (1.0 + 1.0 / (2.0 * iota)) / beta - 1.0
        if r < 0.5 + T:
            s = beta * iota / (2.0 * iota + 1.0) - epsilon
        elif r <= 0.5 + 1.0 / T:
            s = 1.0 / (2.0 * r + 1.0) - epsilon
        else:
            shrink = min(1.0, 2.0 / (2.0 * r - 1.0))
            s = beta * (iota / (2.0 * iota + 1.0)) * shrink - epsilon
    if s <= 0:
        raise ValueError(
            f"selected exponent {s} is not positive; decrease epsilon"
        )
    return s


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    lhs: float
    rhs: float

    @property
    def passes(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def slack(self) -> float:
        """lhs/rhs ratio; >= 1 means the condition holds."""
        if self.rhs == 0.0:
            return math.inf
        return self.lhs / self.rhs


@dataclass(frozen=True)
class DiagnosticReport:
    dre_sample_condition: InequalityCheck
    regression_condition_a: InequalityCheck
    regression_condition_b: InequalityCheck

    @property
    def checks(self):
        return (
            self.dre_sample_condition,
            self.regression_condition_a,
            self.regression_condition_b,
        )

    @property
    def all_pass(self) -> bool:
        return all(c.passes for c in self.checks)


def sample_size_diagnostic(
    n_theta: int,
    n_f: int,
    s: float,
    iota: float,
    m: float,
    r: float,
    alpha: float,
    kernel: KernelSpec,
    delta: float = 0.1,
    delta_phi: float = 1.0,
    xi_m: float = 1.0,
    norm_L_S: float = 1.0,
    norm_L_T: float = 1.0,
) -> DiagnosticReport:
    """Evaluate the theory's sample-size sufficiency inequalities.

    Purely informational, never gates execution. The population operator
    norms are approximated by empirical spectra (pass them in), and the
    unobservable constants (the ratio-estimation constant delta_phi and the
    moment bound xi_m) are config-supplied placeholders, so the verdicts
    indicate scale, not certified sufficiency.

    The three checks, with varsigma = 1/(2*iota+1) and
    nu = (1/m) * 2*iota/(2*iota+1):
      1. n_theta >= 85 k^2 (1 + log(6 k^2 (|L_S| + |L_T| + 1)
             / (min(|L_S|, |L_T|) delta)) + 2/(1 - varsigma))^(2/(1-varsigma))
      2. n_theta^(iota/(2*iota+1) * min(1, 2/(2r-1)) - 2 nu)
             >= 2 k^2 / min(|L_T|, 1)
                * ((1-alpha)^(-3/2) delta_phi + xi_m^(1/2)) log(36/delta) n_f^s
      3. n_f^(1/(2r+1) - s)
             >= 14 k^2 (log(24 k^2 (|L_T|+2) / (|L_T| delta)) + 1 + 1/(2r))
                * n_theta^(2 nu)
    """
    if n_theta < 1 or n_f < 1:
        raise ValueError("sample sizes must be >= 1")
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    k2 = kernel.kappa_sq
    varsigma = 1.0 / (2.0 * iota + 1.0)
    nu = (1.0 / m) * (2.0 * iota / (2.0 * iota + 1.0))

    log_term = math.log(
        6.0 * k2 * (norm_L_S + norm_L_T + 1.0) / (min(norm_L_S, norm_L_T) * delta)
    )
    rhs1 = 85.0 * k2 * (1.0 + log_term + 2.0 / (1.0 - varsigma)) ** (
        2.0 / (1.0 - varsigma)
    )
    check1 = InequalityCheck("dre_sample_condition", float(n_theta), rhs1)

    shrink = 1.0 if r <= 0.5 else min(1.0, 2.0 / (2.0 * r - 1.0))
    lhs2 = float(n_theta) ** (iota / (2.0 * iota + 1.0) * shrink - 2.0 * nu)
    rhs2 = (
        2.0
        * k2
        / min(norm_L_T, 1.0)
        * ((1.0 - alpha) ** (-1.5) * delta_phi + math.sqrt(xi_m))
        * math.log(36.0 / delta)
        * float(n_f) ** s
    )
    check2 = InequalityCheck("regression_condition_a", lhs2, rhs2)

    lhs3 = float(n_f) ** (1.0 / (2.0 * r + 1.0) - s)
    rhs3 = (
        14.0
        * k2
        * (math.log(24.0 * k2 * (norm_L_T + 2.0) / (norm_L_T * delta)) + 1.0 + 1.0 / (2.0 * r))
        * float(n_theta) ** (2.0 * nu)
    )
    check3 = InequalityCheck("regression_condition_b", lhs3, rhs3)

    return DiagnosticReport(check1, check2, check3)


def estimate_operator_norms(
    spec, n: int, seed, kernel: KernelSpec
) -> "tuple[float, float]":
    """Empirical stand-ins for the source/target operator norms: top
    eigenvalue of the probability-weighted sample operator."""
    from .scenarios import sample_source, sample_target

    src = sample_source(spec, n, seed)
    tgt = sample_target(spec, n, seed)
    w = np.full(n, 1.0 / n)
    rep_s = build_operator(src, w, kernel)
    rep_t = build_operator(tgt, w, kernel)
    return rep_s.lam_max, rep_t.lam_max
