import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volrisk.errors import (
    DuplicateDateError,
    EmptyIntersectionError,
    MissingColumnError,
    NonPositiveError,
    NonPositiveValueError,
    TooShortError,
    UnparseableDateError,
)
from volrisk.market_data import (
    AlignedSeries,
    CsvSchema,
    ObservationRecord,
    RiskFreeRecord,
    align,
    ingest_csv,
    ingest_risk_free,
    load_series,
    log_increments,
    write_observations,
    write_risk_free,
)


def _write(path, text):
    path.write_text(text)
    return path


def test_three_rows_passthrough(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close,volume\n2020-01-02,10,5\n2020-01-03,11,6\n2020-01-06,12,7\n")
    recs = ingest_csv(p)
    assert [r.close for r in recs] == [10.0, 11.0, 12.0]
    assert [r.date for r in recs] == sorted(r.date for r in recs)


def test_zero_volume_rejected_with_row(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close,volume\n2020-01-02,10,5\n2020-01-03,11,0\n")
    with pytest.raises(NonPositiveValueError) as info:
        ingest_csv(p)
    assert info.value.row == 2


def test_negative_and_nan_close_rejected(tmp_path):
    for bad in ("-1", "nan", "inf"):
        p = _write(tmp_path / "a.csv", f"date,close,volume\n2020-01-02,{bad},5\n")
        with pytest.raises(NonPositiveValueError):
            ingest_csv(p)


def test_shuffled_dates_sorted(tmp_path, rng):
    days = np.datetime64("2021-03-01") + np.arange(40)
    closes = rng.uniform(1, 100, 40)
    perm = rng.permutation(40)
    lines = ["date,close,volume"] + [f"{days[i]},{float(closes[i])!r},{i + 1}" for i in perm]
    recs = ingest_csv(_write(tmp_path / "s.csv", "\n".join(lines) + "\n"))
    oracle = sorted(((days[i].item(), closes[i], float(i + 1)) for i in range(40)))
    assert [(r.date, r.close, r.volume) for r in recs] == oracle


def test_duplicate_date(tmp_path):
    p = _write(tmp_path / "d.csv", "date,close,volume\n2020-01-02,10,5\n2020-01-02,11,6\n")
    with pytest.raises(DuplicateDateError) as info:
        ingest_csv(p)
    assert info.value.row == 2


def test_missing_column(tmp_path):
    p = _write(tmp_path / "m.csv", "date,close\n2020-01-02,10\n")
    with pytest.raises(MissingColumnError):
        ingest_csv(p)


def test_bad_date(tmp_path):
    p = _write(tmp_path / "b.csv", "date,close,volume\n02/01/2020,10,5\n")
    with pytest.raises(UnparseableDateError):
        ingest_csv(p)
    recs = ingest_csv(p, CsvSchema(date_format="%d/%m/%Y"))
    assert recs[0].date == date(2020, 1, 2)


def test_blank_fields_dropped(tmp_path):
    p = _write(tmp_path / "g.csv", "date,close,volume\n2020-01-02,10,5\n2020-01-03,,6\n2020-01-06,12,7\n")
    assert [r.date.day for r in ingest_csv(p)] == [2, 6]


def test_custom_columns_and_percent(tmp_path):
    p = _write(tmp_path / "r.csv", "Date,DGS3MO\n2020-01-02,1.5\n2020-01-03,.\n2020-01-06,1.6\n")
    schema = CsvSchema(date="Date", rate="DGS3MO")
    recs = ingest_risk_free(p, schema, percent=True)
    assert [r.annual_yield for r in recs] == pytest.approx([0.015, 0.016])


def test_negative_yield_allowed(tmp_path):
    p = _write(tmp_path / "r.csv", "date,yield\n2020-01-02,-0.004\n")
    assert ingest_risk_free(p)[0].annual_yield == -0.004


def _obs(days, start="2020-01-01"):
    d0 = np.datetime64(start)
    return [ObservationRecord((d0 + k).item(), 10.0 + k, 100.0 + k) for k in days]


def _rf(days, values, start="2020-01-01"):
    d0 = np.datetime64(start)
    return [RiskFreeRecord((d0 + k).item(), v) for k, v in zip(days, values)]


def test_align_identical_dates():
    s = align(_obs(range(10)), _rf(range(10), np.linspace(0.01, 0.02, 10)))
    assert len(s) == 10
    np.testing.assert_array_equal(s.risk_free, np.linspace(0.01, 0.02, 10))


def test_align_forward_fills_gap():
    s = align(_obs([0, 1, 2, 3]), _rf([0, 1, 3], [0.01, 0.02, 0.04]))
    assert s.risk_free.tolist() == [0.01, 0.02, 0.02, 0.04]


def test_align_offset_matches_bruteforce(rng):
    obs_days = np.sort(rng.choice(400, 250, replace=False))
    rf_days = obs_days[:-1] + 1  # every yield one day late
    vals = rng.normal(0.02, 0.01, rf_days.size)
    s = align(_obs(obs_days), _rf(rf_days, vals))
    for k, d in enumerate(obs_days):
        prior = [v for rd, v in zip(rf_days, vals) if rd <= d]
        expect = prior[-1] if prior else vals[0]
        assert s.risk_free[k] == expect


def test_align_idempotent(small_market):
    again = align(small_market.records(), small_market.risk_free_records())
    for a, b in ((again.dates, small_market.dates), (again.prices, small_market.prices),
                 (again.volumes, small_market.volumes), (again.risk_free, small_market.risk_free)):
        np.testing.assert_array_equal(a, b)


def test_align_errors():
    with pytest.raises(EmptyIntersectionError):
        align([], _rf([0], [0.01]))
    with pytest.raises(EmptyIntersectionError):
        align(_obs([0]), _rf([0], [0.01]))
    with pytest.raises(ValueError):
        AlignedSeries(np.array(["2020-01-01"], "datetime64[D]"), np.ones(1), np.ones(1), np.ones(1))


def test_write_then_read_identity(tmp_path, small_market):
    recs = small_market.records()
    write_observations(recs, tmp_path / "p.csv")
    write_risk_free(small_market.risk_free_records(), tmp_path / "r.csv")
    assert ingest_csv(tmp_path / "p.csv") == recs
    s = load_series(tmp_path / "p.csv", tmp_path / "r.csv")
    np.testing.assert_array_equal(s.prices, small_market.prices)
    np.testing.assert_array_equal(s.risk_free, small_market.risk_free)


def test_log_increments_examples():
    np.testing.assert_allclose(log_increments([1, math.e, math.e ** 2]), [1.0, 1.0], rtol=1e-15)
    assert log_increments([5, 5, 5]).tolist() == [0.0, 0.0]
    np.testing.assert_allclose(log_increments([100, 105, 99.75]), [math.log(1.05), math.log(0.95)], rtol=1e-12)


def test_log_increments_errors():
    with pytest.raises(TooShortError):
        log_increments([1.0])
    with pytest.raises(NonPositiveError):
        log_increments([1.0, 0.0, 2.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=60))
def test_log_increments_round_trip(values):
    v = np.array(values)
    back = np.exp(np.concatenate([[math.log(v[0])], math.log(v[0]) + np.cumsum(log_increments(v))]))
    np.testing.assert_allclose(back, v, rtol=1e-12)
