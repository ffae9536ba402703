"""End-to-end analysis: estimates, normality tests, risk metrics, segment summaries, forecasts."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import TooShortError, VolRiskError
from .forecast import ForecastPoint, one_day_ahead
from .gbm import WindowedEstimates, rolling_fit
from .market_data import DAY, AlignedSeries
from .risk_metrics import METRIC_COLUMNS, RiskMetrics, compute_metrics
from .stat_tests import InterceptFit, intercept_regression, ks_rows

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowTests:
    dates: np.ndarray
    ks_stat_logvol: np.ndarray
    ks_p_logvol: np.ndarray
    ks_stat_logprice: np.ndarray
    ks_p_logprice: np.ndarray


def window_tests(series: AlignedSeries, window: int, mode: str = "levels") -> WindowTests:
    """KS normality test of log volume and log price inside every estimation window.

    ``mode="levels"`` tests the ``window + 1`` standardized log levels of the
    window; ``mode="increments"`` tests its ``window`` log increments.  Windows
    too short for the test (fewer than 8 values) give NaN.
    """
    n_rows = len(series) - window
    dates = series.dates[window:]

    def run(values):
        logv = np.log(values)
        if mode == "levels":
            w = sliding_window_view(logv, window + 1)
        elif mode == "increments":
            w = sliding_window_view(np.diff(logv), window)
        else:
            raise VolRiskError(f"unknown KS mode {mode!r}")
        try:
            return ks_rows(w)
        except TooShortError:
            logger.warning("window of %d is too short for KS tests; reporting NaN", window)
            nan = np.full(n_rows, np.nan)
            return nan, nan

    sv, pv = run(series.volumes)
    sp, pp = run(series.prices)
    return WindowTests(dates, sv, pv, sp, pp)


@dataclass(frozen=True)
class SegmentSummary:
    segment: int
    start: np.datetime64
    end: np.datetime64
    metric: str
    fit: InterceptFit


def segment_summaries(metrics: RiskMetrics, breakpoints: Sequence[str] = (),
                      columns: Sequence[str] = METRIC_COLUMNS) -> list[SegmentSummary]:
    """Intercept-only regression of each metric on each user-given segment.

    Breakpoints are dates; a breakpoint starts a new segment.  With no
    breakpoints the whole series is one segment.
    """
    bps = np.array(sorted(np.datetime64(b, "D") for b in breakpoints), dtype="datetime64[D]")
    seg_id = np.searchsorted(bps, metrics.dates, side="right")
    out = []
    for k in range(len(bps) + 1):
        mask = seg_id == k
        if mask.sum() < 2:
            raise VolRiskError(f"segment {k} has {int(mask.sum())} metric row(s); need at least 2")
        seg = metrics.segment(mask)
        for c in columns:
            out.append(SegmentSummary(k, seg.dates[0], seg.dates[-1], c, intercept_regression(seg[c])))
    return out


@dataclass(frozen=True)
class Analysis:
    series: AlignedSeries
    estimates: WindowedEstimates
    tests: WindowTests
    metrics: RiskMetrics
    segments: list[SegmentSummary]
    forecast: list[ForecastPoint]


def analyze(series: AlignedSeries, window: int = 125, dt_years: float = DAY, rho_zero: bool = False,
            breakpoints: Sequence[str] = (), forecast_mode: str = "reconstruction",
            ks_mode: str = "levels", workers: int = 1) -> Analysis:
    est = rolling_fit(series, window, dt_years, workers=workers)
    metrics = compute_metrics(est, series.risk_free[window:], rho_zero=rho_zero)
    return Analysis(
        series=series,
        estimates=est,
        tests=window_tests(series, window, ks_mode),
        metrics=metrics,
        segments=segment_summaries(metrics, breakpoints),
        forecast=one_day_ahead(series, est, forecast_mode, dt_years),
    )
