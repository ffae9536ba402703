import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volrisk.errors import (
    DegenerateCombinedVolatilityError,
    NonPositiveSigmaTildeError,
    ZeroPriceVolatilityError,
    ZeroVolatilityError,
)
from volrisk.gbm import GbmEstimate, rolling_fit
from volrisk.risk_metrics import (
    METRIC_COLUMNS,
    calibrate_representative_agent,
    compute_metrics,
    decompose_volume,
    decompose_volume_params,
    girsanov_kernels,
    impacted_drift,
    impacted_price,
    merton_ratio,
    observed_ratio,
    prices_of_risk,
    risk_aversion,
    wealth_dynamics,
)

BASE = dict(mu=0.10, r=0.02, sigma=0.2, psi=0.04, rho=0.0, eta=3.0)
SQRT10 = math.sqrt(10)


def test_decompose_examples():
    d = decompose_volume(GbmEstimate(0.12, 0.6), GbmEstimate(0.1, 0.2))
    assert d.eta == pytest.approx(3.0, rel=1e-15)
    assert d.psi == pytest.approx(0.04, rel=1e-15)
    assert not d.degenerate
    d = decompose_volume_params(0.05, 0.0, 0.2)
    assert (d.eta, d.psi, d.degenerate) == (0.0, 0.0, True)
    d = decompose_volume_params(0.0, 0.2, 0.2)
    assert (d.eta, d.psi) == (1.0, 0.0)
    with pytest.raises(ZeroPriceVolatilityError):
        decompose_volume_params(0.1, 0.2, 0.0)


def test_merton_ratio_examples():
    assert merton_ratio(0.10, 0.02, 0.2) == pytest.approx(0.2, rel=1e-14)
    assert merton_ratio(0.02 + 0.04, 0.02, 0.2) == pytest.approx(0.0, abs=1e-15)
    assert merton_ratio(0.02, 0.02, 0.2) == pytest.approx(-0.2, rel=1e-15)
    with pytest.raises(ZeroVolatilityError):
        merton_ratio(0.1, 0.02, 0.0)


def test_observed_ratio_examples():
    assert observed_ratio(GbmEstimate(0.12, 0.6)) == pytest.approx(0.2, rel=1e-15)
    assert observed_ratio(GbmEstimate(0.0, 0.6)) == 0.0
    with pytest.raises(ZeroVolatilityError):
        observed_ratio(GbmEstimate(0.1, 0.0))


def test_prices_of_risk_example():
    p = prices_of_risk(**BASE)
    assert p.market == pytest.approx(0.4, rel=1e-14)
    assert p.volume == pytest.approx(0.2, rel=1e-14)
    assert p.trading == pytest.approx(0.2 / (0.2 * SQRT10), rel=1e-14)
    assert p.trading == pytest.approx(0.31623, abs=5e-6)


def test_risk_aversion_examples():
    assert risk_aversion(**BASE) == pytest.approx(0.5, rel=1e-14)
    for eta in (0.0, 0.5, 3.0, 10.0):
        assert risk_aversion(0.05, 0.05, 0.2, 0.0, 0.0, eta) == pytest.approx(1.0, abs=1e-15)


def test_wealth_dynamics_examples():
    drift, vol = wealth_dynamics(0.10, 0.2, 0.04, 0.0, 3.0)
    assert drift == pytest.approx(0.22, rel=1e-14)
    assert vol == pytest.approx(0.2 * SQRT10, rel=1e-14)
    assert wealth_dynamics(0.10, 0.2, 0.04, 0.0, 0.0) == pytest.approx((0.10, 0.2), rel=1e-15)
    assert wealth_dynamics(0.10, 0.2, 0.04, 1.0, 1.0)[1] == pytest.approx(0.4, rel=1e-15)
    with pytest.raises(DegenerateCombinedVolatilityError):
        wealth_dynamics(0.10, 0.2, 0.04, -1.0, 1.0)


def test_impacted_drift_examples():
    assert impacted_drift(0.2, 0.02, 0.5, 0.31623) == pytest.approx(0.0516, abs=5e-5)
    assert impacted_drift(0.2, 0.02, 0.5, 0.31623) == pytest.approx(0.02 + 0.1 * 0.31623, rel=1e-15)
    assert impacted_drift(0.2, 0.02, 1.0, 0.7) == pytest.approx(0.02, abs=1e-16)
    assert impacted_drift(0.2, 0.02, 0.3, 0.0) == 0.02
    with pytest.raises(NonPositiveSigmaTildeError):
        impacted_drift(0.0, 0.02, 0.5, 0.3)
    p = impacted_price(0.2, 0.02, 0.5, 0.31623)
    assert p.sigma_tilde == 0.2 and p.mu_tilde == pytest.approx(0.0516, abs=5e-5)


def test_representative_agent_examples():
    ag = calibrate_representative_agent(**BASE)
    assert ag.mu_gamma == pytest.approx(0.5, rel=1e-14)
    assert ag.alpha_rms == pytest.approx(0.2 * SQRT10, rel=1e-14)
    ag = calibrate_representative_agent(0.10, 0.02, 0.2, 0.04, 0.0, 0.0)
    assert ag.alpha_rms == pytest.approx(0.2)
    assert ag.mu_gamma == pytest.approx(1 - 0.08 / 0.04, rel=1e-14)


def test_girsanov_kernels():
    assert girsanov_kernels(**BASE) == pytest.approx((0.4, 0.2), rel=1e-14)
    assert girsanov_kernels(0.02, 0.02, 0.2, 0.04, 0.0, 3.0)[0] == 0.0
    assert girsanov_kernels(0.1, 0.02, 0.2, -0.3 * 0.04, 0.3, 3.0)[1] == pytest.approx(0.0, abs=1e-16)


def test_vectorized_matches_scalar(rng):
    n = 50
    mu, sigma = rng.uniform(-0.1, 0.3, n), rng.uniform(0.05, 0.6, n)
    psi, rho, eta = rng.normal(0, 0.1, n), rng.uniform(-0.5, 0.5, n), rng.uniform(0, 5, n)
    vec = prices_of_risk(mu, 0.02, sigma, psi, rho, eta)
    for k in range(0, n, 7):
        sc = prices_of_risk(mu[k], 0.02, sigma[k], psi[k], rho[k], eta[k])
        assert vec.trading[k] == pytest.approx(sc.trading, rel=1e-15)


params = st.fixed_dictionaries(dict(
    mu=st.floats(-0.5, 0.5), r=st.floats(-0.02, 0.1), sigma=st.floats(0.01, 1.0),
    psi=st.floats(-0.5, 0.5), rho=st.floats(-0.95, 0.95), eta=st.floats(0.0, 20.0),
))


@settings(max_examples=300, deadline=None)
@given(params)
def test_trading_por_identity(p):
    """trading_por * wealth_vol = market_premium + volume_premium * eta."""
    por = prices_of_risk(**p)
    _, vol = wealth_dynamics(p["mu"], p["sigma"], p["psi"], p["rho"], p["eta"])
    lhs = por.trading * vol
    rhs = p["mu"] - p["r"] + (p["psi"] + p["rho"] * p["sigma"] ** 2) * p["eta"]
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-13)
    assert vol >= 0


@settings(max_examples=300, deadline=None)
@given(params, st.sampled_from([0.05, 0.2, 1.0]))
def test_impacted_price_of_risk_is_trading_por(p, sigma_tilde):
    ag = calibrate_representative_agent(**p)
    mu_t = impacted_drift(sigma_tilde, p["r"], ag.mu_gamma, ag.alpha_rms)
    assert (mu_t - p["r"]) / sigma_tilde == pytest.approx(prices_of_risk(**p).trading, rel=1e-10, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(params)
def test_generator_matches_wealth_drift(p):
    ag = calibrate_representative_agent(**p)
    drift, vol = wealth_dynamics(p["mu"], p["sigma"], p["psi"], p["rho"], p["eta"])
    assert p["r"] + ag.alpha_rms ** 2 * (1 - ag.mu_gamma) == pytest.approx(drift, rel=1e-10, abs=1e-12)


def test_compute_metrics_columns(small_market):
    est = rolling_fit(small_market, 60)
    m = compute_metrics(est, small_market.risk_free[60:])
    assert len(m) == len(small_market) - 60
    assert set(m.columns) == set(METRIC_COLUMNS)
    np.testing.assert_allclose(m["eta"], est.sigma_vol / est.sigma_price, rtol=1e-15)
    np.testing.assert_allclose(m["trading_por"] * m["wealth_vol"],
                               m["market_premium"] + m["volume_premium"] * m["eta"], rtol=1e-10, atol=1e-12)
    pt = next(m.points())
    assert pt.date == est.dates[0].item()
    assert pt.mu_gamma == m["mu_gamma"][0]


def test_compute_metrics_rho_zero(small_market):
    est = rolling_fit(small_market, 60)
    m = compute_metrics(est, 0.02, rho_zero=True)
    np.testing.assert_allclose(m["volume_premium"], m["psi"], rtol=0, atol=0)
