"""Plot-ready CSV tables.

Floats are written with ``repr`` so every file re-reads to the exact same
values and repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .forecast import ForecastPoint
from .gbm import WindowedEstimates
from .risk_metrics import METRIC_COLUMNS, RiskMetrics
from .trader_sim import AggregationReport

ESTIMATE_COLUMNS = ("date", "mu_price", "sigma_price", "mu_vol", "sigma_vol", "rho", "rho_pvalue")
TEST_COLUMNS = ("date", "ks_stat_logvol", "ks_p_logvol", "ks_stat_logprice", "ks_p_logprice")
SEGMENT_COLUMNS = ("segment", "start", "end", "metric", "intercept", "std_error", "n")
FORECAST_COLUMNS = ("date", "observed", "forecast", "mode")
AGGREGATION_COLUMNS = tuple(f.name for f in fields(AggregationReport))
CONVERGENCE_COLUMNS = AGGREGATION_COLUMNS + ("abs_mean_error", "rms_residual_mean")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "nan" if math.isnan(v) else repr(v)
    if isinstance(value, np.datetime64):
        return str(value.astype("datetime64[D]"))
    if hasattr(value, "isoformat"):
        return value.isoformat()
    return str(value)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_table(path: str | Path) -> dict[str, list[str]]:
    """Read any emitted CSV back as ``{column: [raw strings]}``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[str]] = {h: [] for h in header}
        for row in reader:
            for h, v in zip(header, row):
                cols[h].append(v)
    return cols


def read_numeric(path: str | Path, column: str) -> np.ndarray:
    return np.array(read_table(path)[column], dtype=float)


def estimates_rows(est: WindowedEstimates):
    return zip(est.dates, est.mu_price, est.sigma_price, est.mu_vol, est.sigma_vol, est.rho, est.rho_pvalue)


def metrics_rows(m: RiskMetrics):
    cols = [m[c] for c in METRIC_COLUMNS]
    return ((d, *(c[i] for c in cols)) for i, d in enumerate(m.dates))


def forecast_rows(points: Sequence[ForecastPoint]):
    return ((p.date, p.observed, p.forecast, p.mode) for p in points)


def aggregation_rows(reports: Sequence[AggregationReport]):
    return ([asdict(r)[c] for c in AGGREGATION_COLUMNS] for r in reports)
