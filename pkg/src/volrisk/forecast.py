"""One-day-ahead price forecasts from rolling GBM estimates.

Two modes are available:

``reconstruction``
    Backs out the standardized shock of the realized ``t -> t+1`` return
    under the window's ``(mu, sigma)`` and feeds it back through the GBM
    step.  The forecast reproduces the observed price, which checks the
    internal consistency of the estimates rather than predictive skill.
``point``
    The conditional mean ``S_t * exp(mu * dt)``; an honest out-of-sample
    forecast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CoverageGapError, EmptyInputError, VolRiskError
from .gbm import WindowedEstimates
from .market_data import DAY, AlignedSeries

MODES = ("reconstruction", "point")


@dataclass(frozen=True)
class ForecastPoint:
    date: date
    observed: float
    forecast: float
    mode: str
    previous: float


def one_day_ahead(series: AlignedSeries, estimates: WindowedEstimates, mode: str = "reconstruction",
                  dt_years: float = DAY) -> list[ForecastPoint]:
    """Forecast the close following each estimate anchor.

    The estimate anchored at ``t`` only uses data up to ``t`` and produces the
    forecast for ``t+1``; the last anchor has no next day and is skipped.
    """
    if mode not in MODES:
        raise VolRiskError(f"mode must be one of {MODES}, got {mode!r}")
    idx = np.searchsorted(series.dates, estimates.dates)
    idx_clipped = np.minimum(idx, len(series) - 1)
    missing = series.dates[idx_clipped] != estimates.dates
    if missing.any():
        d = estimates.dates[int(np.argmax(missing))]
        raise CoverageGapError(f"estimate anchor {d} is not a date of the series")

    keep = idx + 1 < len(series)
    t = idx[keep]
    mu = estimates.mu_price[keep]
    sigma = estimates.sigma_price[keep]
    prev = series.prices[t]
    obs = series.prices[t + 1]

    if mode == "point":
        fc = prev * np.exp(mu * dt_years)
    else:
        drift = (mu - 0.5 * sigma * sigma) * dt_years
        # sigma * dZ recovered from the realized log return
        noise = np.log(obs / prev) - drift
        fc = prev * np.exp(drift + noise)

    dates = series.dates[t + 1]
    return [
        ForecastPoint(d.item(), float(o), float(f), mode, float(p))
        for d, o, f, p in zip(dates, obs, fc, prev)
    ]


class ForecastDiagnostics(NamedTuple):
    mae_rel: float
    rmse_rel: float
    hit_rate: float


def forecast_diagnostics(points: Sequence[ForecastPoint]) -> ForecastDiagnostics:
    """Relative MAE/RMSE and directional hit rate against the previous close.

    A point is a hit when the forecast and the observation move in the same
    direction from the previous close; a flat forecast only hits a flat
    observation.
    """
    if not points:
        raise EmptyInputError("no forecast points")
    obs = np.array([p.observed for p in points])
    fc = np.array([p.forecast for p in points])
    prev = np.array([p.previous for p in points])
    rel = (fc - obs) / obs
    hits = np.sign(fc - prev) == np.sign(obs - prev)
    return ForecastDiagnostics(
        float(np.mean(np.abs(rel))),
        math.sqrt(float(np.mean(rel * rel))),
        float(np.mean(hits)),
    )
