"""Command-line front end: pmf tables, moments, fits, and figure data as CSV/JSON.

Exit codes: 0 success, 2 bad arguments, 3 numerical failure, 4 fit did not
converge (the result is still printed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from .distributions import (
    GfpdParams,
    SfpdParams,
    gfpd_asymptotic_moments,
    gfpd_pmf,
    gfpd_pmf_table,
    gfpd_raw_moments,
    gfpd_validity_check,
    sfpd_pmf,
    sfpd_pmf_table,
)
from .errors import (
    InvalidDistribution,
    InvalidParams,
    NonConvergence,
    NoSolution,
    NotConverged,
    OutOfRange,
    PrecisionExhausted,
)
from .fitting import FitConfig, FitResult, fit_least_squares, fit_moment_match, fit_table1
from .special_functions import SeriesControl

# The library default term budget (10k) is tuned for desk-scale lambda; the
# CLI advertises lambda up to 1e6, where the series peak alone sits near
# lambda^(1/alpha), so it ships with a larger budget.
CLI_MAX_TERMS = 200_000

_NUMERIC_ERRORS = (NonConvergence, InvalidDistribution, PrecisionExhausted)


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None  # None: standard output
    precision: int = 10

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise InvalidParams(f"OutputSpec: format must be csv or json, got {self.format!r}")
        if not (6 <= self.precision <= 17):
            raise InvalidParams(f"OutputSpec: precision must be in [6, 17], got {self.precision}")


def format_number(value, precision: int) -> str:
    """Significant-digit formatting; scientific notation outside [1e-4, 1e6)."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if not isinstance(value, float):
        return str(value)
    if value != value or math.isinf(value):
        return str(value)
    if value == 0.0:
        return "0"
    e = math.floor(math.log10(abs(value)))
    if -4 <= e < 6:
        decimals = precision - 1 - e
        if decimals < 0:
            return str(int(round(value, decimals)))
        return f"{value:.{decimals}f}"
    return f"{value:.{precision - 1}e}"


def _round_sig(value, precision: int):
    if isinstance(value, float) and math.isfinite(value) and value != 0.0:
        return float(f"{value:.{precision}g}")
    return value


def emit(out: OutputSpec, columns: list[str], rows: list[tuple], meta: dict) -> None:
    fh = open(out.path, "w") if out.path else sys.stdout
    try:
        if out.format == "csv":
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(format_number(v, out.precision) for v in row) + "\n")
            for key, val in meta.items():
                fh.write(f"# {key} = {format_number(val, out.precision)}\n")
        else:
            doc = {
                "meta": {k: _round_sig(v, out.precision) for k, v in meta.items()},
                "rows": [
                    {c: _round_sig(v, out.precision) for c, v in zip(columns, row)}
                    for row in rows
                ],
            }
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    finally:
        if out.path:
            fh.close()


def _emit_error_trailer(out: OutputSpec, message: str) -> None:
    fh = open(out.path, "a") if out.path else sys.stdout
    try:
        fh.write(f"# error: {message}\n")
    finally:
        if out.path:
            fh.close()


def _add_common(parser: argparse.ArgumentParser) -> None:
    default_precision = int(os.environ.get("ML_POISSON_PRECISION", "10"))
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--output", default=None, help="output file (default: stdout)")
    parser.add_argument("--precision", type=int, default=default_precision,
                        help="printed significant digits, 6..17 (default 10; "
                        "ML_POISSON_PRECISION overrides)")
    parser.add_argument("--series-rtol", type=float, default=1e-15)
    parser.add_argument("--series-max-terms", type=int, default=CLI_MAX_TERMS)


def _out_spec(parser, args) -> OutputSpec:
    if not (6 <= args.precision <= 17):
        parser.error(f"--precision must be in [6, 17], got {args.precision}")
    return OutputSpec(args.format, args.output, args.precision)


def _ctl(args) -> SeriesControl:
    return SeriesControl(rel_tol=args.series_rtol, max_terms=args.series_max_terms)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlpoisson",
        description="Generalized and standard fractional Poisson distributions: "
        "pmf tables, moments, parameter fits, and figure data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", help="emit a pmf table")
    p.add_argument("dist", choices=["gfpd", "sfpd"])
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--alpha", type=float, help="gfpd order")
    p.add_argument("--beta", type=float, help="gfpd shift")
    p.add_argument("--alpha-s", dest="alpha_s", type=float, help="sfpd order in (0, 1]")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--mass-tol", dest="mass_tol", type=float, default=None,
                   help="adaptive k range: stop once tail mass is below this")
    p.add_argument("--kmax", type=int, default=None, help="fixed k range 0..kmax")
    p.add_argument("--precision-digits", dest="precision_digits", type=int, default=15)
    _add_common(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("moments", help="raw moments, mean/variance, asymptotic limits")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("-n", "--order", dest="order", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("fit", help="fit (alpha, beta) to a standard fractional target")
    p.add_argument("--alpha-s", dest="alpha_s", type=float)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=5.0)
    p.add_argument("--method", choices=["least-squares", "moment-match"],
                   default="least-squares")
    p.add_argument("--table1", action="store_true",
                   help="run the full alpha_s sweep 1.0, 0.9, ..., 0.1")
    p.add_argument("--k-lo", dest="k_lo", type=int, default=None)
    p.add_argument("--k-hi", dest="k_hi", type=int, default=None)
    p.add_argument("--weight", choices=["uniform", "near-maximum"], default="uniform")
    p.add_argument("--weight-width", dest="weight_width", type=int, default=3)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--beta0", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=600)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("figure", help="long-format data behind the sweep figures")
    p.add_argument("which", choices=["fig1", "fig2", "fig3"])
    p.add_argument("--kmax", type=int, default=25)
    _add_common(p)
    p.set_defaults(func=cmd_figure)

    return parser


def cmd_pmf(parser, args) -> int:
    out = _out_spec(parser, args)
    ctl = _ctl(args)
    if args.dist == "gfpd":
        if args.alpha is None or args.beta is None:
            parser.error("pmf gfpd requires --alpha and --beta")
        params = GfpdParams(args.lam, args.alpha, args.beta)
        if args.kmax is not None:
            probs = [gfpd_pmf(params, k, ctl) for k in range(args.kmax + 1)]
            tail = max(0.0, 1.0 - math.fsum(probs))
        else:
            table = gfpd_pmf_table(params, args.mass_tol or 1e-8, ctl)
            probs, tail = list(table.probs), table.tail_mass_bound
        meta = {"dist": "gfpd", "lambda": args.lam, "alpha": args.alpha,
                "beta": args.beta, "tail_mass_bound": tail}
    else:
        if args.alpha_s is None:
            parser.error("pmf sfpd requires --alpha-s")
        params = SfpdParams(args.alpha_s, args.nu, args.lam)
        table = sfpd_pmf_table(params, k_max=args.kmax,
                               mass_tol=None if args.kmax is not None else (args.mass_tol or 1e-8),
                               ctl=ctl, precision_digits=args.precision_digits)
        probs, tail = list(table.probs), table.tail_mass_bound
        meta = {"dist": "sfpd", "lambda": args.lam, "alpha_s": args.alpha_s,
                "nu": args.nu, "tail_mass_bound": tail}
    emit(out, ["k", "p"], [(k, pk) for k, pk in enumerate(probs)], meta)
    return 0


def cmd_moments(parser, args) -> int:
    if args.order < 1 or args.order > 20:
        parser.error(f"-n must be in [1, 20], got {args.order}")
    out = _out_spec(parser, args)
    ctl = _ctl(args)
    params = GfpdParams(args.lam, args.alpha, args.beta)
    mv = gfpd_raw_moments(params, args.order, ctl)
    rows = [(f"mu_{m}", mv.raw[m]) for m in range(args.order + 1)]
    rows.append(("mean", mv.mean))
    rows.append(("variance", mv.variance))
    try:
        sm, sv = gfpd_asymptotic_moments(params, "small_lambda")
        rows.append(("small_lambda_mean", sm))
        rows.append(("small_lambda_variance", sv))
    except InvalidParams:
        pass  # Gamma(beta) pole: no small-lambda form
    if 0.0 < args.alpha < 2.0:
        lm, lv = gfpd_asymptotic_moments(params, "large_lambda")
        rows.append(("large_lambda_mean", lm))
        rows.append(("large_lambda_variance", lv))
    emit(out, ["quantity", "value"],
         rows, {"lambda": args.lam, "alpha": args.alpha, "beta": args.beta})
    return 0


def _fit_config(args) -> FitConfig:
    k_range = None
    if (args.k_lo is None) != (args.k_hi is None):
        raise InvalidParams("fit: give both --k-lo and --k-hi or neither")
    if args.k_lo is not None:
        k_range = (args.k_lo, args.k_hi)
    init = None
    if (args.alpha0 is None) != (args.beta0 is None):
        raise InvalidParams("fit: give both --alpha0 and --beta0 or neither")
    if args.alpha0 is not None:
        init = (args.alpha0, args.beta0)
    return FitConfig(
        method=args.method.replace("-", "_"),
        k_range=k_range,
        weight=args.weight.replace("-", "_"),
        weight_width=args.weight_width,
        init=init,
        tol=args.tol,
        max_iter=args.max_iter,
    )


def cmd_fit(parser, args) -> int:
    out = _out_spec(parser, args)
    ctl = _ctl(args)
    try:
        cfg = _fit_config(args)
    except InvalidParams as exc:
        parser.error(str(exc))

    if args.table1:
        rows = fit_table1(args.lam, args.nu, cfg, ctl)
        emit(out, ["alpha_s", "alpha", "beta", "objective", "iterations", "converged"],
             [(a, r.alpha, r.beta, r.objective, r.iterations, r.converged)
              for a, r in rows],
             {"lambda": args.lam, "nu": args.nu, "method": cfg.method})
        return 0 if all(r.converged for _, r in rows) else 4

    if args.alpha_s is None:
        parser.error("fit requires --alpha-s (or --table1)")
    target = SfpdParams(args.alpha_s, args.nu, args.lam)
    exit_code = 0
    try:
        if cfg.method == "moment_match":
            result = fit_moment_match(target, cfg, ctl)
        else:
            result = fit_least_squares(target, cfg, ctl)
    except (NotConverged, NoSolution) as exc:
        result = exc.result
        exit_code = 4
    if result is None:
        result = FitResult(math.nan, math.nan, math.inf, 0, False, cfg.method)

    rows = []
    if result is not None and math.isfinite(result.alpha):
        fitted = GfpdParams(args.lam, result.alpha, result.beta)
        k = 0
        cum = 0.0
        while cum < 1.0 - 1e-8 and k <= 400:
            pt = sfpd_pmf(target, k, ctl)
            pf = gfpd_pmf(fitted, k, ctl)
            rows.append((k, pt, pf, pt - pf))
            cum += pt
            k += 1
    emit(out, ["k", "p_target", "p_fitted", "residual"], rows,
         {"alpha_s": args.alpha_s, "nu": args.nu, "lambda": args.lam,
          "alpha": result.alpha, "beta": result.beta, "objective": result.objective,
          "iterations": result.iterations, "converged": result.converged,
          "method": result.method})
    return exit_code


def cmd_figure(parser, args) -> int:
    out = _out_spec(parser, args)
    ctl = _ctl(args)
    kmax = args.kmax
    lam = 5.0
    rows: list[tuple] = []
    try:
        if args.which == "fig1":
            # alpha sweep 1.5 down to 0.5 in 0.05 steps at beta = 1
            for i in range(150, 45, -5):
                alpha = i / 100.0
                params = GfpdParams(lam, alpha, 1.0)
                for k in range(kmax + 1):
                    rows.append((alpha, k, gfpd_pmf(params, k, ctl)))
            emit(out, ["alpha", "k", "p"], rows, {"lambda": lam, "beta": 1.0})
        elif args.which == "fig2":
            # beta sweep 4 down to -4 in 0.4 steps at alpha = 1
            for i in range(40, -44, -4):
                beta = i / 10.0
                params = GfpdParams(lam, 1.0, beta)
                check = gfpd_validity_check(params, kmax)
                if not check.valid:
                    rows.append((beta, "", "",
                                 f"invalid: negative term at k={check.first_negative_k}"))
                    continue
                for k in range(kmax + 1):
                    rows.append((beta, k, gfpd_pmf(params, k, ctl), ""))
            emit(out, ["beta", "k", "p", "warning"], rows, {"lambda": lam, "alpha": 1.0})
        else:
            fits = fit_table1(lam, 1.0, FitConfig(), ctl)
            for alpha_s, result in fits:
                target = SfpdParams(alpha_s, 1.0, lam)
                fitted = GfpdParams(lam, result.alpha, result.beta)
                for k in range(kmax + 1):
                    rows.append((alpha_s, k, sfpd_pmf(target, k, ctl),
                                 gfpd_pmf(fitted, k, ctl)))
            emit(out, ["alpha_s", "k", "p_standard", "p_generalized"], rows,
                 {"lambda": lam, "nu": 1.0})
    except _NUMERIC_ERRORS as exc:
        emit(out, _figure_columns(args.which), rows, {})
        _emit_error_trailer(out, str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def _figure_columns(which: str) -> list[str]:
    return {
        "fig1": ["alpha", "k", "p"],
        "fig2": ["beta", "k", "p", "warning"],
        "fig3": ["alpha_s", "k", "p_standard", "p_generalized"],
    }[which]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except (InvalidParams, OutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
