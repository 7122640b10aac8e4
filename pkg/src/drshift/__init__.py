"""Unbounded density-ratio estimation and importance-weighted spectral
regression under covariate shift.

The estimator pipeline: estimate the bounded relative ratio by spectral
regularization, truncate it at a sample-size-driven threshold, and transform
back to the (possibly unbounded) standard ratio. The result plugs into
importance-weighted spectral regression as the weight function.
"""

from ._backend import HAS_NUMBA
from .dre import (
    DensityRatioEstimate,
    RelativeRatioEstimate,
    estimate_density_ratio,
    estimate_relative_ratio,
    relative_of_standard,
    schedule_mu,
    schedule_truncation,
    to_standard_ratio,
    truncate_relative,
    truncation_cap,
)
from .filters import (
    FilterSpec,
    check_filter_conditions,
    filter_value,
    filter_values,
    make_filter,
)
from .kernels import KernelSpec, gram, kappa_sq
from .metrics import (
    SlopeFit,
    excess_target_risk,
    fit_loglog_slope,
    h_norm_proxy,
    mc_l2_error,
)
from .operators import (
    KernelExpansion,
    OperatorRep,
    apply_operator_function,
    build_operator,
    evaluate_expansion,
    krr_coeffs_direct,
)
from .regression import (
    LabeledSample,
    Regressor,
    fit_iw_spectral,
    sample_size_diagnostic,
    schedule_lambda,
    select_exponent_s,
)
from .scenarios import (
    SCENARIO_NAMES,
    ScenarioSpec,
    get_scenario,
    sample_labeled,
    sample_mixture,
    sample_source,
    sample_target,
    true_phi,
    true_theta,
)

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA",
    "DensityRatioEstimate",
    "RelativeRatioEstimate",
    "estimate_density_ratio",
    "estimate_relative_ratio",
    "relative_of_standard",
    "schedule_mu",
    "schedule_truncation",
    "to_standard_ratio",
    "truncate_relative",
    "truncation_cap",
    "FilterSpec",
    "check_filter_conditions",
    "filter_value",
    "filter_values",
    "make_filter",
    "KernelSpec",
    "gram",
    "kappa_sq",
    "SlopeFit",
    "excess_target_risk",
    "fit_loglog_slope",
    "h_norm_proxy",
    "mc_l2_error",
    "KernelExpansion",
    "OperatorRep",
    "apply_operator_function",
    "build_operator",
    "evaluate_expansion",
    "krr_coeffs_direct",
    "LabeledSample",
    "Regressor",
    "fit_iw_spectral",
    "sample_size_diagnostic",
    "schedule_lambda",
    "select_exponent_s",
    "SCENARIO_NAMES",
    "ScenarioSpec",
    "get_scenario",
    "sample_labeled",
    "sample_mixture",
    "sample_source",
    "sample_target",
    "true_phi",
    "true_theta",
    "__version__",
]
