"""Experiment driver: subcommands over JSON configs, CSV and SVG outputs.

Subcommands: check-filters, figure1, estimate-dre, fit, rate-dre,
rate-regression, diagnose. Exit codes: 0 success or all checks pass,
1 check failure, 2 usage or config error.
"""

import argparse
import csv
import math
import multiprocessing
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from . import filters as filters_mod
from .config import ConfigError, ExperimentConfig, load_config
from .dre import estimate_density_ratio, schedule_mu, schedule_truncation
from .filters import FilterSpec, check_filter_conditions, make_filter
from .kernels import KernelSpec, as_points
from .metrics import (
    ReplicationRecord,
    aggregate_median_iqr,
    excess_target_risk,
    fit_loglog_slope,
    mc_l2_error,
)
from .regression import (
    LabeledSample,
    estimate_operator_norms,
    fit_iw_spectral,
    sample_size_diagnostic,
    schedule_lambda,
    select_exponent_s,
)
from .scenarios import (
    get_scenario,
    sample_labeled,
    sample_mixture,
    sample_source,
    sample_target,
    true_phi,
)
from .svgplot import Series, render_line_plot, write_svg

RECORD_HEADER = (
    "scenario", "n_theta", "n_f", "alpha", "iota", "m", "filter", "seed",
    "err_phi_rhoR", "err_theta_rhoS", "err_f_rhoT", "excess_risk",
)

# stream tags keep the training, evaluation, and one-off draws on
# non-overlapping deterministic substreams of the base seed
_TAG_DRE_TRAIN = 0
_TAG_DRE_EVAL = 1
_TAG_REG_TRAIN = 2
_TAG_REG_EVAL = 3
_TAG_SINGLE = 4

_SEED_STRIDE = 100_000  # grid-cell stride for per-replication seeds


def _rep_seed(seed_base: int, grid_index: int, rep: int) -> int:
    return seed_base + _SEED_STRIDE * grid_index + rep


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _write_records(path: str, records):
    rows = [
        (
            rec.scenario, rec.n_theta, rec.n_f, rec.alpha, rec.iota, rec.m,
            rec.filter, rec.seed, rec.err_phi_rhoR, rec.err_theta_rhoS,
            rec.err_f_rhoT, rec.excess_risk,
        )
        for rec in records
    ]
    _write_csv(path, RECORD_HEADER, rows)


def _scenario_kernel(cfg: ExperimentConfig):
    try:
        spec = get_scenario(cfg.scenario)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    bw = cfg.bandwidth if cfg.bandwidth is not None else spec.default_bandwidth
    return spec, KernelSpec(cfg.kernel_family, bw)


def _query_grid(spec, n: int) -> np.ndarray:
    if spec.domain == "unit_interval":
        return np.geomspace(1e-3, 1.0, n)
    return np.linspace(-4.0, 5.0, n)


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    # spawn: forking after numba/OpenMP has initialized is unsafe
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
        return list(ex.map(fn, tasks))


# ---------------------------------------------------------------- rate-dre

def _dre_replication(task: dict):
    spec = get_scenario(task["scenario"])
    kernel = KernelSpec(task["kernel_family"], task["bandwidth"])
    n = task["n_theta"]
    seed = task["seed"]
    alpha = task["alpha"]
    rng = np.random.default_rng((seed, _TAG_DRE_TRAIN))
    src = sample_source(spec, n, rng)
    tgt = sample_target(spec, n, rng)
    est = estimate_density_ratio(
        src, tgt, alpha, kernel,
        filter_family=task["filter_family"], iota=task["iota"], m=task["m"],
        tau=task["tau"], lam_override=task["lam_override"], solver=task["solver"],
    )
    err_phi = mc_l2_error(
        est.phi_raw,
        lambda x: true_phi(spec, alpha, x),
        lambda k, s: sample_mixture(spec, alpha, k, s),
        task["n_mc"], (seed, _TAG_DRE_EVAL, 0),
    )
    err_theta = mc_l2_error(
        est.theta, spec.theta,
        lambda k, s: sample_source(spec, k, s),
        task["n_mc"], (seed, _TAG_DRE_EVAL, 1),
    )
    return err_phi, err_theta


def cmd_rate_dre(cfg: ExperimentConfig) -> int:
    spec, kernel = _scenario_kernel(cfg)
    tasks = []
    for gi, n in enumerate(cfg.n_theta_grid):
        for rep in range(cfg.replications):
            tasks.append({
                "scenario": spec.name, "kernel_family": kernel.family,
                "bandwidth": kernel.bandwidth, "n_theta": n,
                "seed": _rep_seed(cfg.seed_base, gi, rep), "alpha": cfg.alpha,
                "filter_family": cfg.filter_family, "iota": cfg.iota, "m": cfg.m,
                "tau": cfg.filter_tau, "lam_override": cfg.lam_override,
                "solver": cfg.solver, "n_mc": cfg.n_mc,
            })
    results = _run_tasks(_dre_replication, tasks, cfg.effective_workers)

    records = [
        ReplicationRecord(
            scenario=spec.name, n_theta=t["n_theta"], n_f=None, alpha=cfg.alpha,
            iota=cfg.iota, m=cfg.m, filter=cfg.filter_family, seed=t["seed"],
            err_phi_rhoR=r[0], err_theta_rhoS=r[1],
        )
        for t, r in zip(tasks, results)
    ]
    records_path = os.path.join(cfg.out_dir, "rate_dre_records.csv")
    _write_records(records_path, records)

    ns = list(cfg.n_theta_grid)
    med_phi, med_theta, rows = [], [], []
    nu = (1.0 / cfg.m) * (2.0 * cfg.iota / (2.0 * cfg.iota + 1.0))
    exp_phi = -cfg.iota / (2.0 * cfg.iota + 1.0)
    exp_theta = exp_phi + 2.0 * nu
    for n in ns:
        phi_vals = [r.err_phi_rhoR for r in records if r.n_theta == n]
        th_vals = [r.err_theta_rhoS for r in records if r.n_theta == n]
        med_phi.append(aggregate_median_iqr(phi_vals))
        med_theta.append(aggregate_median_iqr(th_vals))
    guide_phi = [med_phi[0][0] * (n / ns[0]) ** exp_phi for n in ns]
    guide_theta = [med_theta[0][0] * (n / ns[0]) ** exp_theta for n in ns]
    for i, n in enumerate(ns):
        rows.append((
            n, med_phi[i][0], med_phi[i][1], med_phi[i][2],
            med_theta[i][0], med_theta[i][1], med_theta[i][2],
            guide_phi[i], guide_theta[i],
        ))
    medians_path = os.path.join(cfg.out_dir, "rate_dre_medians.csv")
    _write_csv(
        medians_path,
        ("n_theta", "median_err_phi_rhoR", "q1_err_phi_rhoR", "q3_err_phi_rhoR",
         "median_err_theta_rhoS", "q1_err_theta_rhoS", "q3_err_theta_rhoS",
         "guide_phi", "guide_theta"),
        rows,
    )

    svg = render_line_plot(
        [
            Series(ns, [m[0] for m in med_phi], "median err phi (rho_R)"),
            Series(ns, [m[0] for m in med_theta], "median err theta (rho_S)"),
            Series(ns, guide_phi, f"guide slope {exp_phi:.3f}", dashed=True),
            Series(ns, guide_theta, f"guide slope {exp_theta:.3f}", dashed=True),
        ],
        xlabel="n_theta", ylabel="error", title=f"ratio estimation rate: {spec.name}",
        loglog=True,
    )
    svg_path = os.path.join(cfg.out_dir, "rate_dre.svg")
    write_svg(svg_path, svg)

    if len(ns) >= 2:
        slope_phi = fit_loglog_slope(ns, [m[0] for m in med_phi])
        slope_theta = fit_loglog_slope(ns, [m[0] for m in med_theta])
        print(f"fitted slope err_phi_rhoR: {slope_phi.slope:.4f} (r2={slope_phi.r2:.3f}, "
              f"guide {exp_phi:.4f})")
        print(f"fitted slope err_theta_rhoS: {slope_theta.slope:.4f} (r2={slope_theta.r2:.3f}, "
              f"guide {exp_theta:.4f})")
    else:
        print("fitted slopes: n/a (single grid point)")
    print(f"wrote {records_path}, {medians_path}, {svg_path}")
    return 0


# ---------------------------------------------------------- rate-regression

def _make_weight_fn(source: str, spec, est):
    if source == "unit":
        return lambda x: np.ones(as_points(x).shape[0])
    if source == "true":
        return spec.theta
    if source == "dre":
        if est is None:
            raise ValueError("dre weights requested but no ratio estimate built")
        return est.theta
    raise ValueError(f"unknown weight source {source!r}")


def _reg_replication(task: dict):
    spec = get_scenario(task["scenario"])
    kernel = KernelSpec(task["kernel_family"], task["bandwidth"])
    seed = task["seed"]
    rng = np.random.default_rng((seed, _TAG_REG_TRAIN))
    data = sample_labeled(spec, task["n_f"], rng, task["noise_sigma"])
    est = None
    if "dre" in task["sources"]:
        src = sample_source(spec, task["n_theta"], rng)
        tgt = sample_target(spec, task["n_theta"], rng)
        est = estimate_density_ratio(
            src, tgt, task["alpha"], kernel,
            filter_family=task["filter_family"], iota=task["iota"], m=task["m"],
            tau=task["tau"], solver=task["solver"],
        )
    filt = make_filter(task["filter_family"], task["lam"], task["tau"])
    out = {}
    for source in task["sources"]:
        reg = fit_iw_spectral(
            data, _make_weight_fn(source, spec, est), kernel, filt,
            solver=task["solver"],
        )
        err_f = mc_l2_error(
            reg, spec.f_rho,
            lambda k, s: sample_target(spec, k, s),
            task["n_mc"], (seed, _TAG_REG_EVAL, 0),
        )
        excess = excess_target_risk(reg, spec, task["n_mc"], (seed, _TAG_REG_EVAL, 1))
        out[source] = (err_f, excess)
    return out


def cmd_rate_regression(cfg: ExperimentConfig) -> int:
    spec, kernel = _scenario_kernel(cfg)
    sources = list(cfg.weight_sources)
    s = select_exponent_s(cfg.beta, cfg.iota, cfg.r, cfg.epsilon)
    ns_f = list(cfg.n_f_grid)
    tasks = []
    for gi, n_f in enumerate(ns_f):
        n_theta = math.ceil(n_f**cfg.beta)
        lam = schedule_lambda(n_f, s)
        for rep in range(cfg.replications):
            tasks.append({
                "scenario": spec.name, "kernel_family": kernel.family,
                "bandwidth": kernel.bandwidth, "n_f": n_f, "n_theta": n_theta,
                "lam": lam, "seed": _rep_seed(cfg.seed_base, gi, rep),
                "alpha": cfg.alpha, "filter_family": cfg.filter_family,
                "iota": cfg.iota, "m": cfg.m, "tau": cfg.filter_tau,
                "solver": cfg.solver, "n_mc": cfg.n_mc, "sources": sources,
                "noise_sigma": cfg.noise_sigma,
            })
    results = _run_tasks(_reg_replication, tasks, cfg.effective_workers)

    paths = []
    per_source = {}
    for source in sources:
        records = [
            ReplicationRecord(
                scenario=spec.name, n_theta=t["n_theta"], n_f=t["n_f"],
                alpha=cfg.alpha, iota=cfg.iota, m=cfg.m, filter=cfg.filter_family,
                seed=t["seed"], err_f_rhoT=r[source][0], excess_risk=r[source][1],
            )
            for t, r in zip(tasks, results)
        ]
        path = os.path.join(cfg.out_dir, f"rate_regression_records_{source}.csv")
        _write_records(path, records)
        paths.append(path)
        per_source[source] = records

    med = {
        source: [
            (
                aggregate_median_iqr(
                    [r.err_f_rhoT for r in per_source[source] if r.n_f == n_f]
                ),
                aggregate_median_iqr(
                    [r.excess_risk for r in per_source[source] if r.n_f == n_f]
                ),
            )
            for n_f in ns_f
        ]
        for source in sources
    }

    header = ["n_f", "n_theta", "lambda"]
    for source in sources:
        header += [f"median_err_f_{source}", f"median_excess_{source}"]
    if "dre" in sources and "unit" in sources:
        header.append("excess_ratio_unit_over_dre")
    rows = []
    for i, n_f in enumerate(ns_f):
        row = [n_f, math.ceil(n_f**cfg.beta), schedule_lambda(n_f, s)]
        for source in sources:
            row += [med[source][i][0][0], med[source][i][1][0]]
        if "dre" in sources and "unit" in sources:
            row.append(med["unit"][i][1][0] / med["dre"][i][1][0])
        rows.append(tuple(row))
    medians_path = os.path.join(cfg.out_dir, "rate_regression_medians.csv")
    _write_csv(medians_path, header, rows)
    paths.append(medians_path)

    guide_exp = -cfg.r * s
    first = med[sources[0]][0][0][0]
    guide = [first * (n / ns_f[0]) ** guide_exp for n in ns_f]
    series = [
        Series(ns_f, [med[source][i][0][0] for i in range(len(ns_f))],
               f"median err_f ({source})")
        for source in sources
    ]
    series.append(Series(ns_f, guide, f"guide slope {guide_exp:.3f}", dashed=True))
    svg_path = os.path.join(cfg.out_dir, "rate_regression.svg")
    write_svg(svg_path, render_line_plot(
        series, xlabel="n_f", ylabel="error",
        title=f"regression rate: {spec.name}", loglog=True,
    ))
    paths.append(svg_path)

    print(f"exponent s = {s!r}")
    for source in sources:
        if len(ns_f) < 2:
            print(f"fitted slope err_f_rhoT ({source}): n/a (single grid point)")
            continue
        fit = fit_loglog_slope(ns_f, [med[source][i][0][0] for i in range(len(ns_f))])
        print(f"fitted slope err_f_rhoT ({source}): {fit.slope:.4f} "
              f"(r2={fit.r2:.3f}, guide {guide_exp:.4f})")
    print("wrote " + ", ".join(paths))
    return 0


# ------------------------------------------------------------ check-filters

def _declared_filter(family: str, tau: Optional[float]) -> FilterSpec:
    if family == "krr":
        # allow a deliberately wrong declared qualification; constants stay 1
        return FilterSpec("krr", 1.0, 1.0 if tau is None else float(tau), 1.0, 1.0)
    return make_filter(family, 1.0, tau)


def cmd_check_filters(cfg: ExperimentConfig) -> int:
    lines = []
    all_pass = True
    for family in filters_mod.FAMILIES:
        tau = cfg.filter_tau if (family == cfg.filter_family and cfg.filter_tau) else None
        spec_f = _declared_filter(family, tau)
        report = check_filter_conditions(spec_f)
        all_pass = all_pass and report.passes
        status = "PASS" if report.passes else "FAIL"
        lines.append(
            f"{family} (tau={spec_f.tau:g}, E={spec_f.E:g}, F={spec_f.F:g}): {status} "
            f"worst_margin={report.worst_margin:.6g} "
            f"witness=(c={report.witness[0]:.6g}, t={report.witness[1]:.6g}, "
            f"lam={report.witness_lam:g}, condition={report.witness_condition})"
        )
    text = "\n".join(lines)
    print(text)
    path = os.path.join(cfg.out_dir, "check_filters.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(f"wrote {path}")
    return 0 if all_pass else 1


# ----------------------------------------------------------------- figure1

def cmd_figure1(cfg: ExperimentConfig) -> int:
    spec, _ = _scenario_kernel(cfg)
    if spec.name == "identity":
        raise ConfigError("figure1 contrasts bounded and unbounded ratios; "
                          "pick a scenario with a non-constant ratio")
    grid = _query_grid(spec, cfg.query_grid_n)
    theta = spec.theta(grid)
    phi = true_phi(spec, cfg.alpha, grid)
    csv_path = os.path.join(cfg.out_dir, f"figure1_{spec.name}.csv")
    _write_csv(csv_path, ("x", "theta", "phi"),
               zip(grid.tolist(), theta.tolist(), phi.tolist()))
    svg_path = os.path.join(cfg.out_dir, f"figure1_{spec.name}.svg")
    write_svg(svg_path, render_line_plot(
        [
            Series(grid.tolist(), theta.tolist(), "theta (standard ratio)"),
            Series(grid.tolist(), phi.tolist(), f"phi (alpha={cfg.alpha:g})"),
        ],
        xlabel="x", ylabel="ratio value",
        title=f"standard vs relative ratio: {spec.name}",
    ))
    print(f"max theta on grid: {float(np.max(theta))!r}")
    print(f"max phi on grid: {float(np.max(phi))!r} (bound 1/alpha = {1.0 / cfg.alpha!r})")
    print(f"wrote {csv_path}, {svg_path}")
    return 0


# ------------------------------------------------------------- estimate-dre

def cmd_estimate_dre(cfg: ExperimentConfig) -> int:
    spec, kernel = _scenario_kernel(cfg)
    n = cfg.single_n_theta()
    rng = np.random.default_rng((cfg.seed_base, _TAG_SINGLE, 0))
    src = sample_source(spec, n, rng)
    tgt = sample_target(spec, n, rng)
    est = estimate_density_ratio(
        src, tgt, cfg.alpha, kernel, filter_family=cfg.filter_family,
        iota=cfg.iota, m=cfg.m, tau=cfg.filter_tau,
        lam_override=cfg.lam_override, solver=cfg.solver,
    )
    grid = _query_grid(spec, cfg.query_grid_n)
    phi_raw = est.phi_raw(grid)
    phi_tr = est.phi(grid)
    theta_hat = est.theta(grid)
    theta_true = spec.theta(grid)
    phi_true = true_phi(spec, cfg.alpha, grid)
    csv_path = os.path.join(cfg.out_dir, f"estimate_dre_{spec.name}.csv")
    _write_csv(
        csv_path,
        ("x", "phi_raw", "phi_trunc", "theta_hat", "theta_true", "phi_true"),
        zip(grid.tolist(), phi_raw.tolist(), phi_tr.tolist(),
            theta_hat.tolist(), theta_true.tolist(), phi_true.tolist()),
    )
    svg_path = os.path.join(cfg.out_dir, f"estimate_dre_{spec.name}.svg")
    write_svg(svg_path, render_line_plot(
        [
            Series(grid.tolist(), theta_true.tolist(), "theta true"),
            Series(grid.tolist(), theta_hat.tolist(), "theta estimate"),
            Series(grid.tolist(), phi_true.tolist(), "phi true", dashed=True),
            Series(grid.tolist(), phi_tr.tolist(), "phi estimate", dashed=True),
        ],
        xlabel="x", ylabel="ratio value",
        title=f"ratio estimate at n_theta={n}: {spec.name}",
    ))
    print(f"n_theta={n} mu={est.base.mu!r} D={est.D!r} cap={est.cap!r}")
    print(f"wrote {csv_path}, {svg_path}")
    return 0


# --------------------------------------------------------------------- fit

def _read_labeled_csv(path: str) -> LabeledSample:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 2:
                raise ConfigError("labeled CSV needs a header with x columns and y")
            rows = [row for row in reader if row]
    except OSError as exc:
        raise ConfigError(f"cannot read labeled CSV: {exc}") from None
    try:
        data = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise ConfigError(f"labeled CSV has a non-numeric cell: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ConfigError("labeled CSV rows do not match the header width")
    return LabeledSample(xs=data[:, :-1], ys=data[:, -1])


def cmd_fit(cfg: ExperimentConfig, data_path: str, weights: Optional[str]) -> int:
    spec, kernel = _scenario_kernel(cfg)
    data = _read_labeled_csv(data_path)
    source = weights or cfg.weight_source
    est = None
    if source == "dre":
        n = cfg.single_n_theta()
        rng = np.random.default_rng((cfg.seed_base, _TAG_SINGLE, 1))
        est = estimate_density_ratio(
            sample_source(spec, n, rng), sample_target(spec, n, rng),
            cfg.alpha, kernel, filter_family=cfg.filter_family, iota=cfg.iota,
            m=cfg.m, tau=cfg.filter_tau, solver=cfg.solver,
        )
    if cfg.lam_override is not None:
        lam = cfg.lam_override
    else:
        s = select_exponent_s(cfg.beta, cfg.iota, cfg.r, cfg.epsilon)
        lam = schedule_lambda(data.n, s)
    filt = make_filter(cfg.filter_family, lam, cfg.filter_tau)
    reg = fit_iw_spectral(
        data, _make_weight_fn(source, spec, est), kernel, filt, solver=cfg.solver
    )
    preds = reg.predict(data.xs)
    d = data.xs.shape[1]
    header = tuple(f"x{i}" for i in range(d)) + ("y", "y_pred") if d > 1 else (
        "x", "y", "y_pred")
    rows = [
        tuple(data.xs[i].tolist()) + (float(data.ys[i]), float(preds[i]))
        for i in range(data.n)
    ]
    out_path = os.path.join(cfg.out_dir, "fit_predictions.csv")
    _write_csv(out_path, header, rows)
    print(f"fit n_f={data.n} lambda={lam!r} weights={source}")
    print(f"wrote {out_path}")
    return 0


# ---------------------------------------------------------------- diagnose

def cmd_diagnose(cfg: ExperimentConfig) -> int:
    spec, kernel = _scenario_kernel(cfg)
    n_theta = cfg.single_n_theta()
    n_f = cfg.single_n_f()
    s = select_exponent_s(cfg.beta, cfg.iota, cfg.r, cfg.epsilon)
    norm_n = min(1000, n_theta)
    norm_L_S, norm_L_T = estimate_operator_norms(
        spec, norm_n, (cfg.seed_base, _TAG_SINGLE, 2), kernel
    )
    report = sample_size_diagnostic(
        n_theta, n_f, s, cfg.iota, cfg.m, cfg.r, cfg.alpha, kernel,
        delta=cfg.delta, delta_phi=cfg.delta_phi, xi_m=cfg.xi_m,
        norm_L_S=norm_L_S, norm_L_T=norm_L_T,
    )
    lines = [
        f"n_theta={n_theta} n_f={n_f} s={s!r} delta={cfg.delta!r}",
        f"operator norm estimates (top empirical eigenvalue, n={norm_n}): "
        f"L_S~{norm_L_S!r} L_T~{norm_L_T!r}",
        "placeholder constants: "
        f"delta_phi={cfg.delta_phi!r} xi_m={cfg.xi_m!r}",
    ]
    for check in report.checks:
        status = "PASS" if check.passes else "FAIL"
        lines.append(
            f"{check.name}: {status} lhs={check.lhs:.6g} rhs={check.rhs:.6g} "
            f"slack={check.slack:.6g}"
        )
    lines.append("informational only; these bounds never gate experiments")
    text = "\n".join(lines)
    print(text)
    path = os.path.join(cfg.out_dir, "diagnose.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(f"wrote {path}")
    return 0


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a JSON config file")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, help="seed base (overrides config)")
    common.add_argument("--workers", type=int, help="worker processes (overrides config)")
    common.add_argument("--scenario", help="scenario name (overrides config)")

    parser = argparse.ArgumentParser(
        prog="drshift",
        description="density-ratio estimation and importance-weighted spectral "
                    "regression experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check-filters", parents=[common],
                   help="verify the filter-family conditions")
    sub.add_parser("figure1", parents=[common],
                   help="plot the true standard vs relative ratio")
    sub.add_parser("estimate-dre", parents=[common],
                   help="run the three-step ratio estimator once and dump curves")
    fit = sub.add_parser("fit", parents=[common],
                         help="fit the weighted regressor on a labeled CSV")
    fit.add_argument(
        "--data", required=True,
        help="labeled CSV with a header row (x columns then y)")
    fit.add_argument("--weights", choices=("dre", "true", "unit"),
                     help="weight source (overrides config)")
    sub.add_parser("rate-dre", parents=[common],
                   help="ratio-estimation error versus n_theta")
    sub.add_parser("rate-regression", parents=[common],
                   help="regression error versus n_f with coupled n_theta")
    sub.add_parser("diagnose", parents=[common],
                   help="evaluate the sample-size sufficiency inequalities")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed_base = args.seed
        if args.workers is not None:
            cfg.workers = args.workers
        if args.scenario is not None:
            cfg.scenario = args.scenario
        cfg.validate()
        os.makedirs(cfg.out_dir, exist_ok=True)
        if args.command == "check-filters":
            return cmd_check_filters(cfg)
        if args.command == "figure1":
            return cmd_figure1(cfg)
        if args.command == "estimate-dre":
            return cmd_estimate_dre(cfg)
        if args.command == "fit":
            return cmd_fit(cfg, args.data, args.weights)
        if args.command == "rate-dre":
            return cmd_rate_dre(cfg)
        if args.command == "rate-regression":
            return cmd_rate_regression(cfg)
        if args.command == "diagnose":
            return cmd_diagnose(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
