"""Geometric Brownian motion calibration on rolling windows.

For a window of log increments with sample mean ``m`` and unbiased sample
standard deviation ``s`` the annualized parameters are::

    sigma = s / sqrt(dt)
    mu    = m / dt + sigma**2 / 2

The same estimator is applied to prices and to volumes, and the correlation
between price and volume shocks is the Pearson coefficient of the two
log-increment windows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import TooShortError, VolRiskError, WindowTooLargeError, WindowTooSmallError, ZeroVarianceError
from .market_data import DAY, AlignedSeries, log_increments
from .stat_tests import pearson_rows

# windows per work unit; fixed so results never depend on the worker count
CHUNK = 4096


@dataclass(frozen=True)
class GbmEstimate:
    mu: float
    sigma: float
    window_start: date | None = None
    window_end: date | None = None
    n_obs: int = 0


def fit_gbm(values, dt_years: float = DAY, window_start: date | None = None,
            window_end: date | None = None) -> GbmEstimate:
    """Method-of-moments GBM fit to a positive series sampled every ``dt_years``."""
    if not dt_years > 0:
        raise VolRiskError("dt_years must be positive")
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise TooShortError("fit_gbm needs at least 3 values (2 increments)")
    x = log_increments(v)
    m = float(x.mean())
    sigma = float(x.std(ddof=1)) / math.sqrt(dt_years)
    return GbmEstimate(
        mu=m / dt_years + 0.5 * sigma * sigma,
        sigma=sigma,
        window_start=window_start,
        window_end=window_end,
        n_obs=int(x.size),
    )


@dataclass(frozen=True)
class WindowedEstimates:
    """Per-anchor price fit, volume fit and shock correlation.

    Row ``k`` is anchored at ``dates[k]`` and uses the ``window`` log increments
    ending on that date.
    """

    dates: np.ndarray
    window: int
    mu_price: np.ndarray
    sigma_price: np.ndarray
    mu_vol: np.ndarray
    sigma_vol: np.ndarray
    rho: np.ndarray
    rho_pvalue: np.ndarray
    window_starts: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)

    def _fits(self, mu, sigma) -> list[GbmEstimate]:
        return [
            GbmEstimate(float(a), float(b), s.item(), e.item(), self.window)
            for a, b, s, e in zip(mu, sigma, self.window_starts, self.dates)
        ]

    @property
    def price_fit(self) -> list[GbmEstimate]:
        return self._fits(self.mu_price, self.sigma_price)

    @property
    def volume_fit(self) -> list[GbmEstimate]:
        return self._fits(self.mu_vol, self.sigma_vol)


def _moments(windows: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    m = windows.mean(axis=1)
    sigma = windows.std(axis=1, ddof=1) / math.sqrt(dt)
    return m / dt + 0.5 * sigma * sigma, sigma


def _fit_chunk(inc_p, inc_v, lo, hi, dt):
    wp = inc_p[lo:hi]
    wv = inc_v[lo:hi]
    mu_p, sig_p = _moments(wp, dt)
    mu_v, sig_v = _moments(wv, dt)
    flat = (sig_p == 0) | (sig_v == 0)
    if flat.any():
        raise ZeroVarianceError(f"window #{lo + int(np.argmax(flat))} has constant price or volume increments")
    rho, pval = pearson_rows(wp, wv, min_n=3)
    return mu_p, sig_p, mu_v, sig_v, rho, pval


def rolling_fit(series: AlignedSeries, window: int = 125, dt_years: float = DAY,
                workers: int = 1) -> WindowedEstimates:
    """Fit price and volume GBMs on every trailing window of ``window`` increments.

    The first anchor is observation ``window`` (so the first fit uses
    observations ``0..window``) and each later window drops the oldest
    increment and appends the newest one.  The output has ``len(series) -
    window`` rows.  ``workers > 1`` evaluates fixed-size blocks of windows in a
    thread pool; results are identical for any worker count.
    """
    if window < 3:
        raise WindowTooSmallError(f"window must be at least 3, got {window}")
    n = len(series)
    if n < window + 1:
        raise WindowTooLargeError(f"window={window} needs at least {window + 1} observations, series has {n}")

    inc_p = sliding_window_view(log_increments(series.prices), window)
    inc_v = sliding_window_view(log_increments(series.volumes), window)
    m = inc_p.shape[0]
    bounds = [(lo, min(lo + CHUNK, m)) for lo in range(0, m, CHUNK)]

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _fit_chunk(inc_p, inc_v, b[0], b[1], dt_years), bounds))
    else:
        parts = [_fit_chunk(inc_p, inc_v, lo, hi, dt_years) for lo, hi in bounds]

    cols = [np.concatenate(c) for c in zip(*parts)]
    return WindowedEstimates(
        series.dates[window:],
        window,
        *cols,
        window_starts=series.dates[: n - window],
    )
