"""Synthetic source/target pairs with exact samplers and closed-form
ground truth.

Shipped scenarios:
  log         source U(0,1), target with density -ln(x) on (0,1),
              theta(x) = -ln(x), unbounded at 0
  logsq       source U(0,1), target with density (ln x)^2 / 2 on (0,1)
  gauss_shift source N(0,1), target N(1,1), theta(x) = exp(x - 1/2)
  identity    source = target = U(0,1), theta constant 1

The log-family targets are sampled exactly as products of independent
uniforms: a product of k uniforms has density (-ln x)^(k-1) / (k-1)!.
The real-line scenario mirrors a Gaussian mean-shift pair; note its support
is not compact, unlike the unit-interval scenarios.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dre import relative_of_standard
from .regression import LabeledSample


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _flat(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        return arr[:, 0]
    return arr


def _col(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x.reshape(-1, 1))


def _open_uniform(n: int, rng: np.random.Generator) -> np.ndarray:
    # (0, 1]: keeps -ln(x) finite on every draw
    return 1.0 - rng.random(n)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    domain: str  # unit_interval | real_line
    theta: Callable
    f_rho: Callable
    noise_sigma: float
    default_bandwidth: float
    source: Callable = field(repr=False)
    target: Callable = field(repr=False)
    # closed-form E_source[theta^m]; all shipped scenarios have every
    # moment finite (Assumption-style metadata M = infinity)
    theta_moment: Optional[Callable] = field(default=None, repr=False)
    moment_M: float = math.inf


def _check_unit_support(x: np.ndarray):
    if (x <= 0).any() or (x > 1).any():
        bad = x[(x <= 0) | (x > 1)][0]
        raise ValueError(f"point {bad!r} is outside the scenario support (0, 1]")


def _theta_log(x):
    x = _flat(x)
    _check_unit_support(x)
    return -np.log(x)


def _theta_logsq(x):
    x = _flat(x)
    _check_unit_support(x)
    return 0.5 * np.log(x) ** 2


def _theta_gauss(x):
    return np.exp(_flat(x) - 0.5)


def _theta_one(x):
    x = _flat(x)
    _check_unit_support(x)
    return np.ones_like(x)


def _f_sin(x):
    return np.sin(2.0 * np.pi * _flat(x))


def _f_bump(x):
    # Bump centered at x = 2, deep in the region the target law covers but
    # the source rarely samples. Unweighted fits shrink this direction hard,
    # so the gain from ratio-weighted fitting is visible at moderate n.
    x = _flat(x)
    return np.exp(-0.5 * (x - 2.0) ** 2)


def _src_uniform(n, rng):
    return _col(_open_uniform(n, rng))


def _tgt_log(n, rng):
    return _col(_open_uniform(n, rng) * _open_uniform(n, rng))


def _tgt_logsq(n, rng):
    return _col(_open_uniform(n, rng) * _open_uniform(n, rng) * _open_uniform(n, rng))


def _src_gauss(n, rng):
    return _col(rng.standard_normal(n))


def _tgt_gauss(n, rng):
    return _col(rng.standard_normal(n) + 1.0)


_REGISTRY = {
    "log": ScenarioSpec(
        name="log",
        domain="unit_interval",
        theta=_theta_log,
        f_rho=_f_sin,
        noise_sigma=0.1,
        default_bandwidth=0.2,
        source=_src_uniform,
        target=_tgt_log,
        theta_moment=lambda m: math.gamma(m + 1.0),
    ),
    "logsq": ScenarioSpec(
        name="logsq",
        domain="unit_interval",
        theta=_theta_logsq,
        f_rho=_f_sin,
        noise_sigma=0.1,
        default_bandwidth=0.2,
        source=_src_uniform,
        target=_tgt_logsq,
        theta_moment=lambda m: math.gamma(2.0 * m + 1.0) / 2.0**m,
    ),
    "gauss_shift": ScenarioSpec(
        name="gauss_shift",
        domain="real_line",
        theta=_theta_gauss,
        f_rho=_f_bump,
        noise_sigma=0.1,
        default_bandwidth=1.0,
        source=_src_gauss,
        target=_tgt_gauss,
        theta_moment=lambda m: math.exp(m * m / 2.0 - m / 2.0),
    ),
    "identity": ScenarioSpec(
        name="identity",
        domain="unit_interval",
        theta=_theta_one,
        f_rho=_f_sin,
        noise_sigma=0.1,
        # narrower than the log family: the sine target needs the finer
        # resolution for its smoothness to register in the regression rate
        default_bandwidth=0.15,
        source=_src_uniform,
        target=_src_uniform,
        theta_moment=lambda m: 1.0,
    ),
}

SCENARIO_NAMES = tuple(_REGISTRY)


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; available: {', '.join(_REGISTRY)}"
        ) from None


def sample_source(spec: ScenarioSpec, n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return spec.source(n, _rng(seed))


def sample_target(spec: ScenarioSpec, n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return spec.target(n, _rng(seed))


def sample_mixture(spec: ScenarioSpec, alpha: float, n: int, seed) -> np.ndarray:
    """Draws from (1-alpha) * source + alpha * target."""
    rng = _rng(seed)
    n_t = int(rng.binomial(n, alpha))
    parts = []
    if n - n_t > 0:
        parts.append(spec.source(n - n_t, rng))
    if n_t > 0:
        parts.append(spec.target(n_t, rng))
    return np.vstack(parts)


def true_theta(spec: ScenarioSpec, x) -> np.ndarray:
    return spec.theta(x)


def true_phi(spec: ScenarioSpec, alpha: float, x) -> np.ndarray:
    return relative_of_standard(spec.theta(x), alpha)


def sample_labeled(
    spec: ScenarioSpec, n_f: int, seed, noise_sigma: Optional[float] = None
) -> LabeledSample:
    """x_i from the source marginal, y_i = f_rho(x_i) + Gaussian noise."""
    if n_f < 1:
        raise ValueError("n_f must be >= 1")
    rng = _rng(seed)
    sigma = spec.noise_sigma if noise_sigma is None else float(noise_sigma)
    xs = spec.source(n_f, rng)
    ys = spec.f_rho(xs) + sigma * rng.standard_normal(n_f)
    return LabeledSample(xs=xs, ys=ys)
