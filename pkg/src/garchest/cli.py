"""Command-line surface: simulate / fit / check / mc subcommands.

Structured results are JSON documents with a schema_version field and a
stable field order; columnar data is CSV with one value per line and '#'
comments.  Exit codes: 0 success, 1 domain error (failed fit,
nonstationary refusal), 2 usage or parse error.  Diagnostics go to
stderr, never into output documents.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .inference import full_inference
from .innovations import (
    InnovationDist,
    laplace_innovations,
    normal_innovations,
    polytail_innovations,
    rescale_to,
    table_innovations,
    FIRST_ABS_MOMENT_ONE,
    SECOND_MOMENT_ONE,
    poly_ratio,
)
from .likelihood import get_family
from .mc import McConfig, run_mc
from .model import GarchOrder, GarchParams, ParamSpace, TimeSeries
from .optimize import FitError, FitOptions, fit
from .simulate import SimConfig, simulate
from .stationarity import garch11_criterion, lyapunov_exponent

SCHEMA_VERSION = 1


class CliError(Exception):
    """Domain-level failure; reported on stderr with exit code 1."""


def parse_series(text: str) -> TimeSeries:
    """One real per line; blank lines and '#' comments are skipped."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise CliError(f"non-numeric value {line!r} at line {lineno}") from None
    if len(values) < 2:
        raise CliError(f"need at least 2 values, got {len(values)}")
    return TimeSeries(np.array(values))


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError:
        raise CliError(f"cannot parse coefficient list {text!r}") from None


def _build_dist(args) -> InnovationDist:
    if args.dist == "normal":
        dist = normal_innovations(args.divisor)
    elif args.dist == "laplace":
        dist = laplace_innovations(args.divisor)
    elif args.dist == "polytail":
        if args.tail_theta is None:
            raise CliError("--dist polytail requires --tail-theta")
        dist = polytail_innovations(args.tail_theta, args.divisor)
    else:
        with open(args.dist) as fh:
            dist = table_innovations(parse_series(fh.read()).values, args.divisor)
    conv = getattr(args, "convention", None)
    if conv:
        if conv == "second-moment-one":
            dist = rescale_to(dist, SECOND_MOMENT_ONE)
        elif conv == "first-abs-moment-one":
            dist = rescale_to(dist, FIRST_ABS_MOMENT_ONE)
        else:
            if args.tail_theta is None:
                raise CliError("poly-ratio convention requires --tail-theta")
            dist = rescale_to(dist, poly_ratio(args.tail_theta))
    return dist


def _build_params(args) -> GarchParams:
    try:
        return GarchParams(args.omega, _parse_vector(args.alpha), _parse_vector(args.beta))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_output(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _np_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def _json_doc(payload: dict) -> str:
    return json.dumps(
        {"schema_version": SCHEMA_VERSION, **payload}, indent=2, default=_np_default
    ) + "\n"


def _cmd_simulate(args) -> int:
    out = simulate(
        SimConfig(
            params=_build_params(args),
            dist=_build_dist(args),
            n=args.n,
            burn_in=args.burn_in,
            seed=args.seed,
        )
    )
    lines = "".join(f"{float(v)!r}\n" for v in out.series.values)
    _write_output(args.output, lines)
    return 0


def _fit_payload(series: TimeSeries, result, inference) -> dict:
    theta = result.theta_hat
    resid = inference.residuals
    return {
        "theta_hat": {
            "omega": theta.omega,
            "alpha": theta.alpha.tolist(),
            "beta": theta.beta.tolist(),
        },
        "objective_value": result.objective_value,
        "converged": result.converged,
        "at_boundary": result.at_boundary,
        "n_iters": result.n_iters,
        "grad_norm": result.grad_norm,
        "information_matrix": inference.A_hat.tolist(),
        "tau_sq": inference.tau_sq_hat,
        "covariance": inference.covariance.tolist(),
        "std_errors": inference.std_errors.tolist(),
        "d_hat": inference.d_hat,
        "residual_summary": {
            "count": int(resid.size),
            "mean": float(resid.mean()),
            "std": float(resid.std(ddof=1)),
            "min": float(resid.min()),
            "max": float(resid.max()),
        },
    }


def _cmd_fit(args) -> int:
    series = parse_series(_read_input(args.input))
    family = get_family(args.family, args.tail_theta)
    space = ParamSpace(GarchOrder(args.p, args.q), args.u_low, args.u_high, args.rho0)
    opts = FitOptions(max_iters=args.max_iters, n_starts=args.n_starts, seed=args.seed)
    try:
        result = fit(series, space, family, opts)
        inference = full_inference(series, result.theta_hat, family)
    except (FitError, RuntimeError, ValueError) as exc:
        raise CliError(f"fit failed: {exc}") from None
    # stationarity gate at the fitted point, using the fitted residuals as
    # an empirical innovation law
    resid_dist = table_innovations(inference.residuals)
    theta = result.theta_hat
    if args.p == 1 and args.q == 1:
        stat = garch11_criterion(theta, resid_dist, seed=args.seed)
    else:
        stat = lyapunov_exponent(theta, resid_dist, seed=args.seed)
    if stat.verdict == "nonstationary" and not args.allow_nonstationary:
        raise CliError(
            f"fitted parameters look nonstationary (gamma = {stat.gamma:.6g}); "
            "rerun with --allow-nonstationary to keep the result"
        )
    payload = _fit_payload(series, result, inference)
    payload["stationarity"] = {
        "gamma": stat.gamma,
        "std_error": stat.std_error,
        "verdict": stat.verdict,
    }
    _write_output(args.output, _json_doc(payload))
    return 0


def _cmd_check(args) -> int:
    params = _build_params(args)
    dist = _build_dist(args)
    if params.order.p == 1 and params.order.q == 1 and not args.full_matrix:
        est = garch11_criterion(params, dist, n_draws=max(args.n_products, 10_000), seed=args.seed)
        method = "garch11-criterion"
    else:
        est = lyapunov_exponent(params, dist, n_products=max(args.n_products, 1000), seed=args.seed)
        method = "lyapunov-power-iteration"
    payload = {
        "method": method,
        "gamma": est.gamma,
        "std_error": est.std_error,
        "n_products": est.n_products,
        "verdict": est.verdict,
    }
    _write_output(args.output, _json_doc(payload))
    return 0


def _cmd_mc(args) -> int:
    families = [get_family(name, args.tail_theta) for name in args.families.split(",")]
    config = McConfig(
        params=_build_params(args),
        dist=_build_dist(args),
        families=families,
        n=args.n,
        n_reps=args.reps,
        seed=args.seed,
        burn_in=args.burn_in,
        oracle_n=args.oracle_n,
        n_jobs=args.n_jobs,
    )
    try:
        summary = run_mc(config)
    except (FitError, RuntimeError, ValueError) as exc:
        raise CliError(f"mc run failed: {exc}") from None
    arms_payload = {}
    for name, arm in summary.arms.items():
        arms_payload[name] = {
            "true_theta": arm.true_theta.tolist(),
            "divisor_ratio": arm.divisor_ratio,
            "failure_count": arm.failure_count,
            "unreliable": arm.unreliable,
            "mean_theta": arm.mean_theta.tolist(),
            "bias": arm.bias.tolist(),
            "rmse": arm.rmse.tolist(),
            "empirical_covariance": arm.emp_cov.tolist(),
            "theoretical_covariance": arm.theo_cov.tolist(),
            "coverage": arm.coverage.tolist(),
        }
    payload = {
        "n": summary.n,
        "n_reps": summary.n_reps,
        "seed": summary.seed,
        "arms": arms_payload,
        "beta_variance_ratios": {k: v.tolist() for k, v in summary.variance_ratios.items()},
    }
    _write_output(args.output, _json_doc(payload))
    if args.reps_csv:
        lines = ["# family,rep,converged,interior," + ",".join(
            ["omega"]
            + [f"alpha{i+1}" for i in range(config.params.order.p)]
            + [f"beta{j+1}" for j in range(config.params.order.q)]
        )]
        for name, arm in summary.arms.items():
            for rep in range(summary.n_reps):
                est = ",".join(repr(float(v)) for v in arm.estimates[rep])
                lines.append(
                    f"{name},{rep},{int(arm.converged[rep])},{int(arm.interior[rep])},{est}"
                )
        with open(args.reps_csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _add_dist_args(sp, convention: bool = True):
    sp.add_argument("--dist", required=True,
                    help="innovation law: normal, laplace, polytail, or a path to a sample file")
    sp.add_argument("--tail-theta", type=float, default=None,
                    help="tail exponent for the polytail law / family")
    sp.add_argument("--divisor", type=float, default=1.0, help="innovation scale divisor")
    if convention:
        sp.add_argument(
            "--convention",
            choices=["second-moment-one", "first-abs-moment-one", "poly-ratio"],
            default=None,
            help="rescale the law to a convention before use",
        )


def _add_params_args(sp):
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--alpha", required=True, help="comma-separated ARCH coefficients")
    sp.add_argument("--beta", required=True, help="comma-separated GARCH coefficients")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="garchest", description="GARCH(p, q) estimation toolkit"
    )
    parser.add_argument("--config", default=None,
                        help="JSON file of defaults for the subcommand flags")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="simulate a GARCH path to CSV")
    _add_params_args(sp)
    _add_dist_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--burn-in", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("fit", help="fit parameters to a series")
    sp.add_argument("--input", default="-", help="series file, '-' for stdin")
    sp.add_argument("--family", required=True, choices=["gaussian", "laplace", "polytail"])
    sp.add_argument("--tail-theta", type=float, default=None)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--u-low", type=float, default=1e-4)
    sp.add_argument("--u-high", type=float, default=10.0)
    sp.add_argument("--rho0", type=float, default=0.999)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n-starts", type=int, default=3)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--allow-nonstationary", action="store_true")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("check", help="stationarity diagnostic for a parameter point")
    _add_params_args(sp)
    _add_dist_args(sp)
    sp.add_argument("--n-products", type=int, default=100_000)
    sp.add_argument("--full-matrix", action="store_true",
                    help="use the companion-matrix estimator even for (1,1)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("mc", help="replicated simulate-and-fit experiment")
    _add_params_args(sp)
    _add_dist_args(sp)
    sp.add_argument("--families", required=True,
                    help="comma-separated score families, e.g. gaussian,laplace")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, required=True)
    sp.add_argument("--burn-in", type=int, default=1000)
    sp.add_argument("--oracle-n", type=int, default=1_000_000)
    sp.add_argument("--n-jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default=None)
    sp.add_argument("--reps-csv", default=None)
    sp.set_defaults(func=_cmd_mc)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pull --config out of argv and turn the file's keys into leading flags
    for the subcommand (so explicit flags override them)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        parser.error("--config needs a file argument")
    rest = argv[:i] + argv[i + 2 :]
    if not rest:
        parser.error("--config requires a subcommand")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            parser.error(f"config file {path}: {exc}")
    if not isinstance(doc, dict):
        parser.error(f"config file {path} must hold a JSON object")
    command, tail = rest[0], rest[1:]
    injected = []
    for key, value in doc.items():
        flag = "--" + str(key).replace("_", "-")
        if value is True:
            injected.append(flag)
        elif value is False or value is None:
            continue
        else:
            injected.extend([flag, str(value)])
    return [command] + injected + tail


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
