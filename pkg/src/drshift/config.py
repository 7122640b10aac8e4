"""Experiment configuration: JSON in, validated dataclass out."""

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .filters import FAMILIES as FILTER_FAMILIES


class ConfigError(Exception):
    """Invalid or unreadable configuration; maps to exit code 2."""


_KERNEL_FAMILIES = ("gaussian", "laplacian")
_WEIGHT_SOURCES = ("dre", "true", "unit")

_TOP_KEYS = {
    "scenario", "kernel", "filter", "alpha", "iota", "m", "r", "epsilon",
    "beta", "n_theta_grid", "n_f_grid", "replications", "n_mc", "seed_base",
    "out_dir", "workers", "weight_source", "weight_sources", "delta",
    "delta_phi", "xi_m", "n_theta", "n_f", "query_grid_n", "noise_sigma",
    "solver",
}


@dataclass
class ExperimentConfig:
    scenario: str = "log"
    kernel_family: str = "gaussian"
    bandwidth: Optional[float] = None  # None: scenario default
    filter_family: str = "krr"
    filter_tau: Optional[float] = None
    lam_override: Optional[float] = None
    alpha: float = 0.5
    iota: float = 0.5
    m: float = 10.0
    r: float = 0.5
    epsilon: float = 0.01
    beta: float = 1.5
    n_theta_grid: Sequence[int] = field(default_factory=lambda: [125, 250, 500, 1000, 2000])
    n_f_grid: Sequence[int] = field(default_factory=lambda: [100, 200, 400, 800])
    replications: int = 20
    n_mc: int = 100_000
    seed_base: int = 1
    out_dir: str = "out"
    workers: int = 0  # 0: logical CPU count
    weight_source: str = "dre"
    weight_sources: Sequence[str] = field(default_factory=lambda: ["dre", "unit", "true"])
    delta: float = 0.1
    delta_phi: float = 1.0
    xi_m: float = 1.0
    n_theta: Optional[int] = None  # single-run size; None: max of the grid
    n_f: Optional[int] = None
    query_grid_n: int = 512
    noise_sigma: Optional[float] = None
    solver: str = "auto"

    def __post_init__(self):
        self.validate()

    def validate(self):
        err = _require
        err(self.kernel_family in _KERNEL_FAMILIES,
            f"kernel family must be one of {_KERNEL_FAMILIES}")
        if self.bandwidth is not None:
            err(self.bandwidth > 0, "bandwidth must be positive")
        err(self.filter_family in FILTER_FAMILIES,
            f"filter family must be one of {FILTER_FAMILIES}")
        if self.filter_tau is not None:
            err(self.filter_tau >= 1, "filter tau must be >= 1")
        if self.lam_override is not None:
            err(self.lam_override > 0, "lam_override must be positive")
        err(0 < self.alpha < 1, "alpha must lie in (0, 1)")
        err(self.iota >= 0.5, "iota must be >= 1/2")
        err(self.m > 2, "m must exceed 2")
        err(self.r >= 0.5, "r must be >= 1/2")
        err(self.epsilon > 0, "epsilon must be positive")
        err(self.beta >= 1, "beta must be >= 1")
        for name, grid in (("n_theta_grid", self.n_theta_grid), ("n_f_grid", self.n_f_grid)):
            err(len(grid) >= 1, f"{name} must be non-empty")
            err(all(isinstance(v, int) and v >= 1 for v in grid),
                f"{name} entries must be positive integers")
            err(all(a < b for a, b in zip(grid, grid[1:])),
                f"{name} must be strictly increasing")
        err(1 <= self.replications < 100_000, "replications must be in [1, 100000)")
        err(self.n_mc >= 1, "n_mc must be >= 1")
        err(self.seed_base >= 0, "seed_base must be non-negative")
        err(self.workers >= 0, "workers must be >= 0")
        err(self.weight_source in _WEIGHT_SOURCES,
            f"weight_source must be one of {_WEIGHT_SOURCES}")
        err(len(self.weight_sources) >= 1
            and all(w in _WEIGHT_SOURCES for w in self.weight_sources)
            and len(set(self.weight_sources)) == len(self.weight_sources),
            f"weight_sources must be distinct entries from {_WEIGHT_SOURCES}")
        err(0 < self.delta < 1, "delta must lie in (0, 1)")
        err(self.delta_phi >= 0, "delta_phi must be >= 0")
        err(self.xi_m >= 0, "xi_m must be >= 0")
        if self.n_theta is not None:
            err(self.n_theta >= 1, "n_theta must be >= 1")
        if self.n_f is not None:
            err(self.n_f >= 1, "n_f must be >= 1")
        err(self.query_grid_n >= 2, "query_grid_n must be >= 2")
        if self.noise_sigma is not None:
            err(self.noise_sigma >= 0, "noise_sigma must be >= 0")
        err(self.solver in ("auto", "eig", "direct"),
            "solver must be one of auto, eig, direct")

    @property
    def effective_workers(self) -> int:
        if self.workers > 0:
            return self.workers
        return os.cpu_count() or 1

    def single_n_theta(self) -> int:
        return self.n_theta if self.n_theta is not None else max(self.n_theta_grid)

    def single_n_f(self) -> int:
        return self.n_f if self.n_f is not None else max(self.n_f_grid)


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kwargs = {}
    kernel = raw.get("kernel", {})
    if not isinstance(kernel, dict):
        raise ConfigError("'kernel' must be an object")
    bad = set(kernel) - {"family", "bandwidth"}
    if bad:
        raise ConfigError(f"unknown kernel keys: {sorted(bad)}")
    if "family" in kernel:
        kwargs["kernel_family"] = kernel["family"]
    if "bandwidth" in kernel and kernel["bandwidth"] is not None:
        kwargs["bandwidth"] = float(kernel["bandwidth"])

    filt = raw.get("filter", {})
    if not isinstance(filt, dict):
        raise ConfigError("'filter' must be an object")
    bad = set(filt) - {"family", "tau", "lam_override"}
    if bad:
        raise ConfigError(f"unknown filter keys: {sorted(bad)}")
    if "family" in filt:
        kwargs["filter_family"] = filt["family"]
    if "tau" in filt and filt["tau"] is not None:
        kwargs["filter_tau"] = float(filt["tau"])
    if "lam_override" in filt and filt["lam_override"] is not None:
        kwargs["lam_override"] = float(filt["lam_override"])

    for key in _TOP_KEYS - {"kernel", "filter"}:
        if key in raw and raw[key] is not None:
            kwargs[key] = raw[key]

    int_keys = ("replications", "n_mc", "seed_base", "workers", "n_theta", "n_f",
                "query_grid_n")
    float_keys = ("alpha", "iota", "m", "r", "epsilon", "beta", "delta",
                  "delta_phi", "xi_m", "noise_sigma")
    try:
        for k in int_keys:
            if k in kwargs:
                kwargs[k] = int(kwargs[k])
        for k in float_keys:
            if k in kwargs:
                kwargs[k] = float(kwargs[k])
        if "n_theta_grid" in kwargs:
            kwargs["n_theta_grid"] = [int(v) for v in kwargs["n_theta_grid"]]
        if "n_f_grid" in kwargs:
            kwargs["n_f_grid"] = [int(v) for v in kwargs["n_f_grid"]]
        if "weight_sources" in kwargs:
            kwargs["weight_sources"] = list(kwargs["weight_sources"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from None

    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Parse a JSON config file; None yields the defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(raw)
