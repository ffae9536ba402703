"""Ingestion and alignment of daily price, volume and risk-free series.

Input files are plain CSV with a header row.  The price/volume file carries
``date,close,volume`` and the risk-free file ``date,yield``; column names and
the date format are configurable through :class:`CsvSchema`.

Prices are assumed to be already adjusted for splits and dividends.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateDateError,
    EmptyIntersectionError,
    MissingColumnError,
    NonPositiveError,
    NonPositiveValueError,
    TooShortError,
    UnparseableDateError,
    VolRiskError,
)

logger = logging.getLogger(__name__)

TRADING_DAYS_PER_YEAR = 252
DAY = 1.0 / TRADING_DAYS_PER_YEAR


@dataclass(frozen=True)
class ObservationRecord:
    date: date
    close: float
    volume: float


@dataclass(frozen=True)
class RiskFreeRecord:
    date: date
    annual_yield: float


@dataclass(frozen=True)
class CsvSchema:
    """Column mapping for a price/volume or risk-free CSV file."""

    date: str = "date"
    close: str = "close"
    volume: str = "volume"
    rate: str = "yield"
    date_format: str = "%Y-%m-%d"


@dataclass(frozen=True)
class AlignedSeries:
    """Date-indexed table of prices, volumes and forward-filled risk-free yields."""

    dates: np.ndarray  # datetime64[D]
    prices: np.ndarray
    volumes: np.ndarray
    risk_free: np.ndarray

    def __post_init__(self):
        n = len(self.dates)
        if not (len(self.prices) == len(self.volumes) == len(self.risk_free) == n):
            raise VolRiskError("aligned sequences must have equal length")
        if n < 2:
            raise TooShortError("an aligned series needs at least 2 dates")

    def __len__(self) -> int:
        return len(self.dates)

    def records(self) -> list[ObservationRecord]:
        return [
            ObservationRecord(d.item(), float(c), float(v))
            for d, c, v in zip(self.dates, self.prices, self.volumes)
        ]

    def risk_free_records(self) -> list[RiskFreeRecord]:
        return [RiskFreeRecord(d.item(), float(y)) for d, y in zip(self.dates, self.risk_free)]

    def slice(self, start: int, stop: int) -> "AlignedSeries":
        return AlignedSeries(
            self.dates[start:stop],
            self.prices[start:stop],
            self.volumes[start:stop],
            self.risk_free[start:stop],
        )


def _parse_date(text: str, fmt: str, row: int) -> date:
    try:
        return datetime.strptime(text.strip(), fmt).date()
    except ValueError:
        raise UnparseableDateError(f"row {row}: cannot parse date {text!r} with format {fmt!r}") from None


def _parse_float(text: str, column: str, row: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise VolRiskError(f"row {row}: column {column!r} is not a number: {text!r}") from None


def _read_rows(path: str | Path, required: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise MissingColumnError(f"{path}: missing column(s) {', '.join(missing)}")
        reader.fieldnames = header
        return list(reader)


def _check_unique(dates: list[date], rows: list[int]) -> None:
    seen: dict[date, int] = {}
    for d, row in zip(dates, rows):
        if d in seen:
            raise DuplicateDateError(f"row {row}: date {d.isoformat()} already seen at row {seen[d]}", row=row)
        seen[d] = row


def ingest_csv(path: str | Path, schema: CsvSchema | None = None) -> list[ObservationRecord]:
    """Read a price/volume CSV file into records sorted by date.

    Rows where the close or the volume field is blank are treated as missing
    observations and dropped.  Any other non-positive or non-finite value is
    an error.
    """
    schema = schema or CsvSchema()
    rows = _read_rows(path, [schema.date, schema.close, schema.volume])

    records, row_numbers = [], []
    dropped = 0
    for i, row in enumerate(rows, start=1):
        close_text = (row.get(schema.close) or "").strip()
        volume_text = (row.get(schema.volume) or "").strip()
        d = _parse_date(row[schema.date], schema.date_format, i)
        if not close_text or not volume_text:
            dropped += 1
            continue
        close = _parse_float(close_text, schema.close, i)
        volume = _parse_float(volume_text, schema.volume, i)
        for name, value in ((schema.close, close), (schema.volume, volume)):
            if not (math.isfinite(value) and value > 0):
                raise NonPositiveValueError(f"row {i}: {name} must be positive, got {value}", row=i)
        records.append(ObservationRecord(d, close, volume))
        row_numbers.append(i)

    if dropped:
        logger.info("%s: dropped %d row(s) with a missing close or volume", path, dropped)
    _check_unique([r.date for r in records], row_numbers)
    return sorted(records, key=lambda r: r.date)


def ingest_risk_free(
    path: str | Path,
    schema: CsvSchema | None = None,
    percent: bool = False,
) -> list[RiskFreeRecord]:
    """Read a ``date,yield`` CSV file.  ``percent=True`` divides yields by 100."""
    schema = schema or CsvSchema()
    rows = _read_rows(path, [schema.date, schema.rate])
    scale = 0.01 if percent else 1.0

    records, row_numbers = [], []
    for i, row in enumerate(rows, start=1):
        text = (row.get(schema.rate) or "").strip()
        d = _parse_date(row[schema.date], schema.date_format, i)
        if not text or text == ".":  # FRED marks holidays with "."
            continue
        value = _parse_float(text, schema.rate, i)
        if not math.isfinite(value):
            raise VolRiskError(f"row {i}: yield must be finite, got {value}")
        records.append(RiskFreeRecord(d, value * scale))
        row_numbers.append(i)

    _check_unique([r.date for r in records], row_numbers)
    return sorted(records, key=lambda r: r.date)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_observations(records: Iterable[ObservationRecord], path: str | Path, schema: CsvSchema | None = None) -> None:
    schema = schema or CsvSchema()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([schema.date, schema.close, schema.volume])
        for r in records:
            w.writerow([r.date.strftime(schema.date_format), _fmt(r.close), _fmt(r.volume)])


def write_risk_free(records: Iterable[RiskFreeRecord], path: str | Path, schema: CsvSchema | None = None) -> None:
    schema = schema or CsvSchema()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([schema.date, schema.rate])
        for r in records:
            w.writerow([r.date.strftime(schema.date_format), _fmt(r.annual_yield)])


def align(price_vol: Sequence[ObservationRecord], rf: Sequence[RiskFreeRecord]) -> AlignedSeries:
    """Put risk-free yields on the price/volume calendar.

    Each date takes the most recent yield observed on or before it; dates
    before the first yield observation take the first yield.
    """
    if not price_vol or not rf:
        raise EmptyIntersectionError("both the price/volume and risk-free inputs must be non-empty")
    if len(price_vol) < 2:
        raise EmptyIntersectionError("need at least 2 dates with both a price and a volume")

    pv = sorted(price_vol, key=lambda r: r.date)
    rf_sorted = sorted(rf, key=lambda r: r.date)

    dates = np.array([r.date for r in pv], dtype="datetime64[D]")
    if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
        raise DuplicateDateError("price/volume dates must be unique")
    rf_dates = np.array([r.date for r in rf_sorted], dtype="datetime64[D]")
    rf_values = np.array([r.annual_yield for r in rf_sorted], dtype=float)

    idx = np.searchsorted(rf_dates, dates, side="right") - 1
    idx = np.clip(idx, 0, None)

    return AlignedSeries(
        dates=dates,
        prices=np.array([r.close for r in pv], dtype=float),
        volumes=np.array([r.volume for r in pv], dtype=float),
        risk_free=rf_values[idx],
    )


def load_series(
    price_volume_path: str | Path,
    risk_free_path: str | Path,
    schema: CsvSchema | None = None,
    yield_percent: bool = False,
) -> AlignedSeries:
    return align(
        ingest_csv(price_volume_path, schema),
        ingest_risk_free(risk_free_path, schema, percent=yield_percent),
    )


def log_increments(values) -> np.ndarray:
    """``ln(v[k+1]) - ln(v[k])`` for a strictly positive sequence."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise TooShortError("need at least 2 values to form an increment")
    if not np.all(v > 0):
        raise NonPositiveError("log increments require strictly positive values")
    return np.diff(np.log(v))
