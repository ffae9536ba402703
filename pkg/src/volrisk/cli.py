"""Command-line entry point.

    volrisk analyze PRICES.csv RATES.csv [--window N] [--rho-zero] [--segments d1,d2]
                                         [--yield-percent] [--mode M] [--out DIR]
    volrisk forecast PRICES.csv RATES.csv [--window N] [--mode M] [--out DIR]
    volrisk simulate SPEC.txt [--seed S] [--out DIR]
    volrisk version
    volrisk help

Exit codes: 0 success, 1 invalid input or configuration, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, SimulationConfig, load_simulation_config, run_config_values
from .errors import VolRiskError
from .forecast import one_day_ahead
from .gbm import rolling_fit
from .market_data import load_series
from .pipeline import analyze
from .report import (
    AGGREGATION_COLUMNS,
    CONVERGENCE_COLUMNS,
    ESTIMATE_COLUMNS,
    FORECAST_COLUMNS,
    METRIC_COLUMNS,
    SEGMENT_COLUMNS,
    TEST_COLUMNS,
    aggregation_rows,
    estimates_rows,
    forecast_rows,
    metrics_rows,
    write_table,
)
from .trader_sim import convergence_study, generator_path, residual_rms, simulate_xi

logger = logging.getLogger("volrisk")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("price_volume", nargs="?", help="CSV with date,close,volume")
    p.add_argument("risk_free", nargs="?", help="CSV with date,yield")
    p.add_argument("--config", help="key = value run configuration; flags override it")
    p.add_argument("--window", type=int, help="estimation window in trading days (default 125)")
    p.add_argument("--annualization", type=float, help="trading days per year (default 252)")
    p.add_argument("--yield-percent", action="store_true", default=None,
                   help="risk-free yields are in percent")
    p.add_argument("--mode", choices=("reconstruction", "point"), help="forecast mode")
    p.add_argument("--workers", type=int, help="worker threads")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="volrisk", description="Volume-implied risk premia and trader aggregation.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    a = sub.add_parser("analyze", help="rolling estimates, tests, risk metrics, segments and forecasts")
    _add_common(a)
    a.add_argument("--rho-zero", action="store_true", default=None, help="force rho = 0 in the risk formulas")
    a.add_argument("--segments", help="comma-separated breakpoint dates for segment regressions")
    a.add_argument("--ks-mode", choices=("levels", "increments"), help="what the KS test is applied to")
    a.add_argument("--seed", type=int, help="recorded for reproducibility; the analysis is deterministic")

    f = sub.add_parser("forecast", help="one-day-ahead price forecasts only")
    _add_common(f)

    s = sub.add_parser("simulate", help="trader aggregation and convergence study")
    s.add_argument("spec", help="key = value population spec")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", default=".")

    sub.add_parser("version", help="print the version")
    sub.add_parser("help", help="show this help")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = run_config_values(args.config) if args.config else {}
    overrides = {
        "price_volume_path": args.price_volume,
        "risk_free_path": args.risk_free,
        "window": args.window,
        "annualization": args.annualization,
        "yield_percent": args.yield_percent,
        "mode": args.mode,
        "workers": args.workers,
        "output_dir": args.out,
        "rho_mode": "zero" if getattr(args, "rho_zero", None) else None,
        "segments": tuple(s.strip() for s in args.segments.split(",") if s.strip())
        if getattr(args, "segments", None) else None,
        "ks_mode": getattr(args, "ks_mode", None),
        "seed": getattr(args, "seed", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    if not cfg.price_volume_path or not cfg.risk_free_path:
        raise VolRiskError("both a price/volume file and a risk-free file are required")
    return cfg


def _emit(out_dir: str | Path, tables: Sequence[tuple[str, Sequence[str], Callable]]) -> list[Path]:
    """Write every table or none of them."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name, header, rows in tables:
            written.append(write_table(out / name, header, rows()))
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        (out / tables[len(written)][0]).unlink(missing_ok=True)
        raise
    return written


def cmd_analyze(args) -> int:
    cfg = _run_config(args)
    series = load_series(cfg.price_volume_path, cfg.risk_free_path, yield_percent=cfg.yield_percent)
    res = analyze(
        series,
        window=cfg.window,
        dt_years=cfg.dt_years,
        rho_zero=cfg.rho_mode == "zero",
        breakpoints=cfg.segments,
        forecast_mode=cfg.mode,
        ks_mode=cfg.ks_mode,
        workers=cfg.workers,
    )
    t = res.tests
    seg_rows = lambda: (
        (s.segment, s.start, s.end, s.metric, s.fit.intercept, s.fit.std_error, s.fit.n) for s in res.segments
    )
    written = _emit(cfg.output_dir, [
        ("estimates.csv", ESTIMATE_COLUMNS, lambda: estimates_rows(res.estimates)),
        ("tests.csv", TEST_COLUMNS,
         lambda: zip(t.dates, t.ks_stat_logvol, t.ks_p_logvol, t.ks_stat_logprice, t.ks_p_logprice)),
        ("metrics.csv", ("date",) + METRIC_COLUMNS, lambda: metrics_rows(res.metrics)),
        ("segments.csv", SEGMENT_COLUMNS, seg_rows),
        ("forecast.csv", FORECAST_COLUMNS, lambda: forecast_rows(res.forecast)),
    ])
    for p in written:
        logger.info("wrote %s", p)
    return EXIT_OK


def cmd_forecast(args) -> int:
    cfg = _run_config(args)
    series = load_series(cfg.price_volume_path, cfg.risk_free_path, yield_percent=cfg.yield_percent)
    est = rolling_fit(series, cfg.window, cfg.dt_years, workers=cfg.workers)
    points = one_day_ahead(series, est, cfg.mode, cfg.dt_years)
    _emit(cfg.output_dir, [("forecast.csv", FORECAST_COLUMNS, lambda: forecast_rows(points))])
    return EXIT_OK


def run_simulation(cfg: SimulationConfig, out_dir: str | Path) -> list[Path]:
    spec = cfg.spec
    report = simulate_xi(spec, cfg.workers)
    reports = convergence_study(spec, cfg.n_grid, cfg.workers)
    if cfg.n_seeds > 1:
        rms = residual_rms(spec, cfg.n_grid, cfg.n_seeds, cfg.workers)
    else:
        rms = np.abs([r.residual_mean for r in reports])
    gen = generator_path(spec.mu_alpha, spec.sigma_alpha, spec.mu_gamma, spec.r, spec.dt_years,
                         spec.n_steps, spec.seed)

    def conv_rows():
        for r, row, q in zip(reports, aggregation_rows(reports), rms):
            yield (*row, abs(r.sample_mean_xi - r.theory_mean_xi), q)

    return _emit(out_dir, [
        ("aggregation.csv", AGGREGATION_COLUMNS, lambda: aggregation_rows([report])),
        ("convergence.csv", CONVERGENCE_COLUMNS, conv_rows),
        ("paths.csv", ("step", "time", "generator"),
         lambda: ((k, k * spec.dt_years, v) for k, v in enumerate(gen))),
    ])


def cmd_simulate(args) -> int:
    cfg = load_simulation_config(args.spec)
    if args.seed is not None:
        cfg = replace(cfg, spec=cfg.spec.replace(seed=args.seed))
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    for p in run_simulation(cfg, args.out):
        logger.info("wrote %s", p)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.command in (None, "help"):
        parser.print_help()
        return EXIT_OK
    if args.command == "version":
        print(f"volrisk {__version__}")
        return EXIT_OK

    handler = {"analyze": cmd_analyze, "forecast": cmd_forecast, "simulate": cmd_simulate}[args.command]
    try:
        return handler(args)
    except VolRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
