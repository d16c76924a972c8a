"""Command-line interface: fit, quantiles, gof, bootstrap, simulate, summarize.

Exit codes: 0 success, 2 input error, 3 numerical non-convergence,
4 degenerate bootstrap.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .bootstrap import bootstrap_ci
from .dataio import read_values, summarize
from .distribution import GEParams, cdf
from .estimators import FitConfig, fit_lpf, fit_mle, quantile_plugin
from .exceptions import (
    ConvergenceError,
    DataError,
    DegenerateBootstrapError,
    GelpfError,
    ParameterError,
    QuadratureError,
)
from .gof import ecdf, gof_report
from .likelihood import SortedSample
from .simulate import DEFAULT_ZETAS, SimConfig, run_simulation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3
EXIT_DEGENERATE = 4


def _fit_config(args) -> FitConfig:
    if getattr(args, "tol", None):
        return FitConfig(quad_rel_tol=args.tol, grad_rel_tol=max(args.tol, 1e-8) * 100)
    return FitConfig()


def _load_sample(args) -> SortedSample:
    values = read_values(args.data)
    return SortedSample.from_data(
        values,
        ties="jitter" if getattr(args, "jitter_ties", False) else "error",
        rng=getattr(args, "seed", None),
    )


def _emit(payload: dict, args) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _fit_once(sample: SortedSample, args):
    config = _fit_config(args)
    if args.method == "lpf":
        cutoff = args.beta_cutoff if args.beta_cutoff is not None else np.inf
        return fit_lpf(sample, config, beta_cutoff=cutoff,
                       gamma_nonneg=args.gamma_nonneg)
    return fit_mle(sample, config)


def cmd_fit(args) -> int:
    sample = _load_sample(args)
    fit = _fit_once(sample, args)
    payload = dataclasses.asdict(fit)
    payload["method"] = args.method
    if args.json:
        _emit(payload, args)
    else:
        print(f"method            {args.method}")
        print(f"n                 {sample.n}")
        print(f"scale (alpha)     {fit.alpha_hat:.4f}")
        print(f"shape (beta)      {fit.beta_hat:.4f}")
        print(f"location (gamma)  {fit.gamma_hat:.4f}")
        if args.method == "lpf":
            print(f"gamma initial     {fit.gamma_init:.4f}")
        print(f"log-likelihood    {fit.loglik_at_max:.6f}")
        print(f"converged         {fit.converged}")
        for note in getattr(fit, "notes", []):
            print(f"note              {note}")
    return EXIT_OK if fit.converged else EXIT_NONCONVERGENCE


def cmd_quantiles(args) -> int:
    sample = _load_sample(args)
    fit = _fit_once(sample, args)
    zetas = args.zetas if args.zetas else list(DEFAULT_ZETAS)
    rows = [(z, float(quantile_plugin(fit, z))) for z in zetas]
    if args.json:
        _emit({"method": args.method, "quantiles": {str(z): q for z, q in rows}}, args)
    else:
        print("zeta      quantile")
        for z, q in rows:
            print(f"{z:<8g}  {q:.4f}")
    return EXIT_OK if fit.converged else EXIT_NONCONVERGENCE


def cmd_gof(args) -> int:
    sample = _load_sample(args)
    fit = _fit_once(sample, args)
    params = GEParams(fit.alpha_hat, fit.beta_hat, fit.gamma_hat)
    report = gof_report(sample, params)
    if args.emit_cdf:
        step = ecdf(sample)
        with open(args.emit_cdf, "w", encoding="utf-8") as fh:
            fh.write("x,ecdf,fitted_cdf\n")
            for x in sample.xs:
                fh.write(f"{x},{step(x)},{float(cdf(x, params))}\n")
    payload = dataclasses.asdict(report)
    payload["method"] = args.method
    payload["params"] = {"scale": params.alpha, "shape": params.beta,
                         "location": params.gamma}
    if args.json:
        _emit(payload, args)
    else:
        print(f"KS  statistic {report.ks_stat:.4f}   p-value {report.ks_pvalue:.4f}")
        print(f"CvM statistic {report.cvm_stat:.4f}   p-value {report.cvm_pvalue:.4f}")
        print(f"({report.convention})")
    return EXIT_OK if fit.converged else EXIT_NONCONVERGENCE


def cmd_bootstrap(args) -> int:
    sample = _load_sample(args)
    config = _fit_config(args)
    fit = fit_lpf(sample, config, gamma_nonneg=args.gamma_nonneg)
    report = bootstrap_ci(
        sample, fit, levels=tuple(args.levels), reps=args.reps,
        beta_cutoff=args.beta_cutoff, seed=args.seed if args.seed is not None else 0,
        threads=args.threads, config=config,
    )
    if args.json:
        _emit(report.as_dict(), args)
    else:
        print(f"{report.method}; replicates {report.replicates_requested}, "
              f"used {report.replicates_used}, rejection p {report.rejection_proportion:.4f}")
        for level in report.levels:
            by = report.intervals[level]
            print(f"{level:.0%}:")
            for key in ("shape", "scale", "location"):
                lo, hi = by[key]
                print(f"  {key:9s} ({lo:.4f}, {hi:.4f})")
    return EXIT_OK


def cmd_simulate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if "beta_cutoffs" in raw:
        raw["beta_cutoffs"] = {float(k): float(v) for k, v in raw["beta_cutoffs"].items()}
    for key in ("beta_grid", "n_grid", "zeta_grid", "methods"):
        if key in raw:
            raw[key] = tuple(raw[key])
    if args.reps is not None:
        raw["reps"] = args.reps
    if args.threads is not None:
        raw["threads"] = args.threads
    if args.seed is not None:
        raw["master_seed"] = args.seed
    cfg = SimConfig(**raw)
    report = run_simulation(cfg)
    report.to_csv(args.out + ".csv")
    report.to_json(args.out + ".json")
    print(f"wrote {args.out}.csv and {args.out}.json "
          f"({len(report.cells)} cells, {cfg.reps} replicates each)")
    return EXIT_OK


def cmd_summarize(args) -> int:
    values = read_values(args.data)
    stats = summarize(values)
    if args.json:
        _emit(stats.as_dict(), args)
    else:
        print("min     q1      median  mean    q3      max     skew   kurtosis")
        print(f"{stats.min:<7.2f} {stats.q1:<7.2f} {stats.median:<7.2f} "
              f"{stats.mean:<7.2f} {stats.q3:<7.2f} {stats.max:<7.2f} "
              f"{stats.skewness:<6.2f} {stats.kurtosis:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gelpf",
        description="Three-parameter generalized exponential fitting via the "
                    "location-parameter-free (LPF) likelihood",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_method=True, cutoff_default=None):
        p.add_argument("data", help="data file: one value per line or single CSV line")
        if with_method:
            p.add_argument("--method", choices=("lpf", "mle"), default="lpf")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--tol", type=float, default=None,
                       help="override quadrature relative tolerance")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jitter-ties", action="store_true",
                       help="break exact ties with half-resolution jitter")
        p.add_argument("--gamma-nonneg", action="store_true",
                       help="clamp the location estimate at zero")
        p.add_argument("--beta-cutoff", type=float, default=cutoff_default,
                       help="flag fits with shape estimate at or above this")

    p = sub.add_parser("fit", help="fit the distribution")
    add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("quantiles", help="plug-in quantiles of a fitted model")
    add_common(p)
    p.add_argument("--zetas", type=float, nargs="+", default=None)
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("gof", help="goodness-of-fit tests for a fitted model")
    add_common(p)
    p.add_argument("--emit-cdf", metavar="FILE", default=None,
                   help="write (x, ecdf, fitted cdf) rows as CSV")
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("bootstrap", help="parametric bootstrap confidence intervals")
    add_common(p, with_method=False, cutoff_default=12.0)
    p.add_argument("--levels", type=float, nargs="+", default=[0.95, 0.99])
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("simulate", help="run a Monte Carlo study from a JSON config")
    p.add_argument("config", help="JSON file with study fields (grids, reps, seeds)")
    p.add_argument("--out", default="simulation_report",
                   help="output path stem for the CSV/JSON reports")
    p.add_argument("--reps", type=int, default=None, help="override replicate count")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("summarize", help="descriptive statistics of a data file")
    p.add_argument("data")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_summarize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ParameterError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, QuadratureError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DegenerateBootstrapError as exc:
        print(f"degenerate bootstrap: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except GelpfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
