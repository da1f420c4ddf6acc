"""CSV ingestion, report emission, and the command-line surface.

Input price files are comma-separated with one header row and columns
``date,price`` (single asset) or ``date,price_s,price_y`` (paired
assets). Every output file is accompanied by a ``<out>.config.json``
sidecar echoing the fully resolved run configuration, seed included, so
any artifact can be regenerated byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import garch as garch_mod
from .copula import FAMILIES, fit_mle, pseudo_observations
from .dist import ParetoLomax
from .errors import DataError, DcovarError, DomainError
from .risk import DependentPair, RiskLevels
from .simulate import CSV_SCHEMA_VERSION, SimScenario, run_scenario, sweep_delta_curve

__all__ = [
    "PriceSeries",
    "to_negative_log_returns",
    "read_price_csv",
    "write_sidecar",
    "main",
]

DEFAULT_SEED_ENV = "DCOVAR_SEED"


@dataclass(frozen=True)
class PriceSeries:
    timestamps: tuple
    prices: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.prices) <= 0.0):
            bad = int(np.flatnonzero(np.asarray(self.prices) <= 0.0)[0])
            raise DataError(f"nonpositive price at row {bad}", row=bad)


def to_negative_log_returns(p: PriceSeries) -> np.ndarray:
    """Loss series -ln(P_t / P_{t-1}); length is one less than the prices."""
    prices = np.asarray(p.prices, dtype=float)
    if prices.size < 2:
        raise DataError("need at least two prices to form returns")
    return -np.diff(np.log(prices))


def read_price_csv(path: str) -> list[PriceSeries]:
    """One or two price series from a ``date,price[,price]`` CSV."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise DataError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    n_cols = len(header)
    if n_cols < 2:
        raise DataError(f"{path}: expected at least date,price columns")
    stamps: list[str] = []
    cols: list[list[float]] = [[] for _ in range(n_cols - 1)]
    for i, row in enumerate(body):
        if len(row) != n_cols:
            raise DataError(f"{path}: wrong column count at row {i}", row=i)
        stamps.append(row[0])
        for j in range(1, n_cols):
            try:
                value = float(row[j])
            except ValueError:
                raise DataError(f"{path}: non-numeric price at row {i}", row=i)
            if value <= 0.0:
                raise DataError(f"{path}: nonpositive price at row {i}", row=i)
            cols[j - 1].append(value)
    ts = tuple(stamps)
    return [PriceSeries(ts, np.asarray(c)) for c in cols]


def _read_series_pair(path: str, as_returns: bool) -> tuple[np.ndarray, np.ndarray]:
    series = read_price_csv(path)
    if len(series) < 2:
        raise DataError(f"{path}: need two price columns (date,price_s,price_y)")
    if as_returns:
        return np.asarray(series[0].prices), np.asarray(series[1].prices)
    return to_negative_log_returns(series[0]), to_negative_log_returns(series[1])


def write_sidecar(out_path: str, config: dict) -> str:
    """Persist the resolved run configuration next to its output file."""
    sidecar = f"{out_path}.config.json"
    with open(sidecar, "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get(DEFAULT_SEED_ENV)
    return int(env) if env is not None else 0


def _build_copula(args):
    return FAMILIES[args.copula](args.theta)


def _levels_grid(alphas, deltas, a, d) -> list[RiskLevels]:
    return [RiskLevels(al, a, de, d) for al in alphas for de in deltas]


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    cop = _build_copula(args)
    pair = DependentPair(
        ParetoLomax(args.beta_target), ParetoLomax(args.beta_assoc), cop
    )
    grid = _levels_grid(args.alpha, args.delta, args.a, args.d)
    scenario = SimScenario(pair=pair, levels_grid=grid, n_obs=args.n, seed=seed)
    report = run_scenario(scenario)
    report.to_csv(args.out)
    write_sidecar(
        args.out,
        {
            "command": "simulate",
            "copula": args.copula,
            "theta": args.theta,
            "alpha": list(args.alpha),
            "delta": list(args.delta),
            "a": args.a,
            "d": args.d,
            "n": args.n,
            "seed": seed,
            "beta_target": args.beta_target,
            "beta_assoc": args.beta_assoc,
            "schema": CSV_SCHEMA_VERSION,
        },
    )
    return 0


def _cmd_curve(args) -> int:
    cop = _build_copula(args)
    pair = DependentPair(
        ParetoLomax(args.beta_target), ParetoLomax(args.beta_assoc), cop
    )
    grid = np.linspace(args.delta_start, args.delta_stop, args.delta_steps)
    curve = sweep_delta_curve(pair, args.alpha, args.a, args.d, grid)
    with open(args.out, "w", newline="") as fh:
        fh.write(f"# {CSV_SCHEMA_VERSION}\n")
        writer = csv.writer(fh)
        writer.writerow(["delta", "dcovar", "mcovar"])
        for delta, dval, mval in curve:
            writer.writerow([repr(delta), repr(dval), repr(mval)])
    write_sidecar(
        args.out,
        {
            "command": "curve",
            "copula": args.copula,
            "theta": args.theta,
            "alpha": args.alpha,
            "a": args.a,
            "d": args.d,
            "delta_start": args.delta_start,
            "delta_stop": args.delta_stop,
            "delta_steps": args.delta_steps,
            "beta_target": args.beta_target,
            "beta_assoc": args.beta_assoc,
            "schema": CSV_SCHEMA_VERSION,
        },
    )
    return 0


def _cmd_garch_fit(args) -> int:
    series = read_price_csv(args.input)
    rows = []
    for i, s in enumerate(series):
        x = np.asarray(s.prices) if args.returns else to_negative_log_returns(s)
        fit = garch_mod.fit_mle_garch(x)
        rows.append((f"series_{i + 1}", fit))
    print("series,kappa0,kappa1,eta,nu,loglik")
    for name, fit in rows:
        p = fit.spec
        print(
            f"{name},{p.kappa0:.4f},{p.kappa1:.4f},{p.eta:.4f},{p.nu:.4f},"
            f"{fit.loglik:.4f}"
        )
    return 0


def _cmd_copula_fit(args) -> int:
    xs, ys = _read_series_pair(args.input, args.returns)
    if args.on_residuals:
        xs = garch_mod.fit_mle_garch(xs).standardized_residuals
        ys = garch_mod.fit_mle_garch(ys).standardized_residuals
    uv = pseudo_observations(xs, ys)
    fitted = fit_mle(args.copula, uv)
    print(f"family,theta,loglik")
    print(f"{fitted.family},{fitted.theta:.4f},{fitted.fitted_loglik:.4f}")
    return 0


def _cmd_forecast(args) -> int:
    xs, ys = _read_series_pair(args.input, args.returns)
    fit_s = garch_mod.fit_mle_garch(xs)
    fit_y = garch_mod.fit_mle_garch(ys)
    uv = pseudo_observations(
        fit_s.standardized_residuals, fit_y.standardized_residuals
    )
    cop = fit_mle(args.copula, uv) if args.theta is None else _build_copula(args)
    levels = RiskLevels(args.alpha[0], args.a, args.delta[0], args.d)
    value = garch_mod.dcovar_forecast(
        fit_s, fit_y, cop, levels, t=len(xs), tail=args.tail
    )
    print(f"dcovar_forecast,{value!r}")
    return 0


def _cmd_backtest(args) -> int:
    xs, ys = _read_series_pair(args.input, args.returns)
    grid = _levels_grid(args.alpha, args.delta, args.a, args.d)
    report = garch_mod.rolling_backtest(
        xs, ys, args.copula, grid, in_sample=args.in_sample,
        refit_every=args.refit_every,
    )
    report.to_csv(args.out)
    write_sidecar(
        args.out,
        {
            "command": "backtest",
            "copula": args.copula,
            "alpha": list(args.alpha),
            "delta": list(args.delta),
            "a": args.a,
            "d": args.d,
            "in_sample": args.in_sample,
            "refit_every": args.refit_every,
            "input": os.path.abspath(args.input),
            "schema": CSV_SCHEMA_VERSION,
        },
    )
    return 0


_TABLE_GRIDS = {
    "1": ("clayton", 7.0),
    "2": ("gumbel", 6.3),
    "3": ("frank", 25.0),
}


def _cmd_table(args) -> int:
    if args.which in _TABLE_GRIDS:
        family, theta = _TABLE_GRIDS[args.which]
        if args.copula:
            family = args.copula
        if args.theta is not None:
            theta = args.theta
        seed = _resolve_seed(args)
        pair = DependentPair(ParetoLomax(1.5), ParetoLomax(1.5), FAMILIES[family](theta))
        grid = _levels_grid([0.90, 0.95], [0.90, 0.925, 0.95], 0.1, 0.1)
        scenario = SimScenario(pair=pair, levels_grid=grid, n_obs=args.n, seed=seed)
        report = run_scenario(scenario)
        out = args.out or "table.csv"
        report.to_csv(out)
        write_sidecar(
            out,
            {"command": "table", "which": args.which, "copula": family,
             "theta": theta, "n": args.n, "seed": seed,
             "schema": CSV_SCHEMA_VERSION},
        )
        return 0

    # table 5: empirical joint-significance and violation layout
    if args.input is None:
        raise DataError("table 5 requires --input with a paired return/price CSV")
    xs, ys = _read_series_pair(args.input, args.returns)
    grid = [
        RiskLevels(0.10, 0.0, 0.10, 0.0),
        RiskLevels(0.15, 0.0, 0.15, 0.0),
        RiskLevels(0.10, 0.0, 0.15, 0.0),
        RiskLevels(0.15, 0.0, 0.10, 0.0),
    ]
    family = args.copula or "clayton"
    if args.theta is not None:
        cells = []
        cop = FAMILIES[family](args.theta)
        report = None
        for levels in grid:
            cells.append(100.0 * float(cop.cdf(levels.alpha, levels.delta)))
        print("copula,theta," + ",".join(
            f"sig_{l.alpha:.2f}_{l.delta:.2f}" for l in grid))
        print(f"{family},{args.theta}," + ",".join(f"{c:.2f}" for c in cells))
        if args.out:
            report = garch_mod.rolling_backtest(
                xs, ys, family, grid, in_sample=args.in_sample
            )
            report.to_csv(args.out)
            write_sidecar(
                args.out,
                {"command": "table", "which": "5", "copula": family,
                 "theta": args.theta, "in_sample": args.in_sample,
                 "input": os.path.abspath(args.input),
                 "schema": CSV_SCHEMA_VERSION},
            )
        return 0
    report = garch_mod.rolling_backtest(xs, ys, family, grid, in_sample=args.in_sample)
    out = args.out or "table5.csv"
    report.to_csv(out)
    write_sidecar(
        out,
        {"command": "table", "which": "5", "copula": family, "theta": None,
         "in_sample": args.in_sample, "input": os.path.abspath(args.input),
         "schema": CSV_SCHEMA_VERSION},
    )
    return 0


def _add_common_measure_args(p, multi_levels=True):
    if multi_levels:
        p.add_argument("--alpha", type=float, action="append", required=True)
        p.add_argument("--delta", type=float, action="append", required=True)
    else:
        p.add_argument("--alpha", type=float, nargs=1, required=True)
        p.add_argument("--delta", type=float, nargs=1, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--d", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcovar",
        description="Dependent conditional VaR: simulation, fitting, forecasting, backtesting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo study grid (tables 1-3 layout)")
    p.add_argument("--copula", choices=sorted(FAMILIES), required=True)
    p.add_argument("--theta", type=float, required=True)
    _add_common_measure_args(p)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--beta-target", type=float, default=1.5)
    p.add_argument("--beta-assoc", type=float, default=1.5)
    p.add_argument("--out", default="simulate.csv")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("curve", help="forecast curve over a delta grid (figure data)")
    p.add_argument("--copula", choices=sorted(FAMILIES), required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--a", type=float, default=0.1)
    p.add_argument("--d", type=float, default=0.1)
    p.add_argument("--delta-start", type=float, default=0.90)
    p.add_argument("--delta-stop", type=float, default=0.95)
    p.add_argument("--delta-steps", type=int, default=11)
    p.add_argument("--beta-target", type=float, default=1.5)
    p.add_argument("--beta-assoc", type=float, default=1.5)
    p.add_argument("--out", default="curve.csv")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("garch-fit", help="GARCH(1,1)-t parameter estimates per series")
    p.add_argument("--input", required=True)
    p.add_argument("--returns", action="store_true",
                   help="input columns are already loss returns")
    p.set_defaults(func=_cmd_garch_fit)

    p = sub.add_parser("copula-fit", help="copula MLE on a paired series")
    p.add_argument("--input", required=True)
    p.add_argument("--copula", choices=sorted(FAMILIES), required=True)
    p.add_argument("--returns", action="store_true")
    p.add_argument("--on-residuals", action="store_true",
                   help="fit on GARCH standardized residuals instead of raw returns")
    p.set_defaults(func=_cmd_copula_fit)

    p = sub.add_parser("forecast", help="one-step-ahead dependent forecast")
    p.add_argument("--input", required=True)
    p.add_argument("--copula", choices=sorted(FAMILIES), required=True)
    p.add_argument("--theta", type=float, default=None)
    _add_common_measure_args(p)
    p.add_argument("--tail", choices=["lower", "upper"], default="lower")
    p.add_argument("--returns", action="store_true")
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("backtest", help="rolling out-of-sample violation backtest")
    p.add_argument("--input", required=True)
    p.add_argument("--copula", choices=sorted(FAMILIES), required=True)
    _add_common_measure_args(p)
    p.add_argument("--in-sample", type=int, default=1000)
    p.add_argument("--refit-every", type=int, default=None)
    p.add_argument("--returns", action="store_true")
    p.add_argument("--out", default="backtest.csv")
    p.set_defaults(func=_cmd_backtest)

    p = sub.add_parser("table", help="reproduce a study table layout")
    p.add_argument("--which", choices=["1", "2", "3", "5"], required=True)
    p.add_argument("--copula", choices=sorted(FAMILIES), default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--returns", action="store_true")
    p.add_argument("--in-sample", type=int, default=1000)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_table)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        row = f" (row {exc.row})" if exc.row is not None else ""
        print(f"error: {exc}{row}", file=sys.stderr)
        return 1
    except DcovarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
