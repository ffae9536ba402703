"""Volume-implied risk quantities.

Volume is modelled as ``dn = n * eta * (psi dt + sigma dQ)`` next to the price
GBM ``dS = S (mu dt + sigma dZ)`` with ``corr(dZ, dQ) = rho``.  From fitted
price and volume parameters this module derives the trading rate ``eta``, the
volume drift component ``psi``, the market / volume / trading prices of risk,
the average risk aversion of the trader population, and the drift of the
impacted price.

All functions accept scalars or numpy arrays and broadcast.  Preconditions are
checked over the whole input; nothing is clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from datetime import date
from typing import Iterator, NamedTuple

import numpy as np

from .errors import (
    DegenerateCombinedVolatilityError,
    NonPositiveSigmaTildeError,
    VolRiskError,
    ZeroPriceVolatilityError,
    ZeroVolatilityError,
)
from .gbm import GbmEstimate, WindowedEstimates


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _require_sigma(sigma, exc=ZeroVolatilityError, name="sigma"):
    if not np.all(_arr(sigma) > 0):
        raise exc(f"{name} must be strictly positive")


def combined_factor(rho, eta):
    """``1 + eta**2 + 2*rho*eta``, the squared ratio of wealth to price volatility."""
    rho, eta = _arr(rho), _arr(eta)
    c = 1.0 + eta * eta + 2.0 * rho * eta
    if not np.all(c > 0):
        raise DegenerateCombinedVolatilityError("1 + eta^2 + 2 rho eta must be positive")
    return c


class VolumeDecomposition(NamedTuple):
    eta: float | np.ndarray
    psi: float | np.ndarray
    degenerate: bool | np.ndarray


def decompose_volume_params(mu_vol, sigma_vol, sigma_price) -> VolumeDecomposition:
    mu_vol, sigma_vol, sigma_price = _arr(mu_vol), _arr(sigma_vol), _arr(sigma_price)
    _require_sigma(sigma_price, ZeroPriceVolatilityError, "price volatility")
    if np.any(sigma_vol < 0):
        raise VolRiskError("volume volatility must be nonnegative")
    eta = sigma_vol / sigma_price
    degenerate = eta == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = np.where(degenerate, 0.0, mu_vol / np.where(degenerate, 1.0, eta))
    return VolumeDecomposition(_out(eta), _out(psi), bool(degenerate) if degenerate.ndim == 0 else degenerate)


def decompose_volume(vol_fit: GbmEstimate, price_fit: GbmEstimate) -> VolumeDecomposition:
    """Split the volume drift and volatility into ``eta * psi`` and ``eta * sigma``.

    A volume series with zero volatility has ``eta = 0``; ``psi`` is then
    undetermined and reported as 0 with ``degenerate=True``.
    """
    return decompose_volume_params(vol_fit.mu, vol_fit.sigma, price_fit.sigma)


def merton_ratio(mu, r, sigma):
    """Volume drift-to-volatility ratio implied by frictionless Merton trading."""
    mu, r, sigma = _arr(mu), _arr(r), _arr(sigma)
    _require_sigma(sigma)
    return _out((mu - r - sigma * sigma) / sigma)


def observed_ratio_params(mu_vol, sigma_vol):
    mu_vol, sigma_vol = _arr(mu_vol), _arr(sigma_vol)
    _require_sigma(sigma_vol, name="volume volatility")
    return _out(mu_vol / sigma_vol)


def observed_ratio(vol_fit: GbmEstimate) -> float:
    """Drift-to-volatility ratio of the fitted volume process."""
    return observed_ratio_params(vol_fit.mu, vol_fit.sigma)


class PricesOfRisk(NamedTuple):
    market: float | np.ndarray
    volume: float | np.ndarray
    trading: float | np.ndarray


def prices_of_risk(mu, r, sigma, psi, rho, eta) -> PricesOfRisk:
    """Market, volume and trading prices of risk.

    market  = (mu - r) / sigma
    volume  = (psi + rho sigma^2) / sigma
    trading = (mu - r + (psi + rho sigma^2) eta) / (sigma sqrt(1 + eta^2 + 2 rho eta))

    The trading price of risk reduces to the market one when ``eta = 0``.
    """
    mu, r, sigma, psi, rho, eta = map(_arr, (mu, r, sigma, psi, rho, eta))
    _require_sigma(sigma)
    c = combined_factor(rho, eta)
    vol_premium = psi + rho * sigma * sigma
    return PricesOfRisk(
        _out((mu - r) / sigma),
        _out(vol_premium / sigma),
        _out((mu - r + vol_premium * eta) / (sigma * np.sqrt(c))),
    )


def risk_aversion(mu, r, sigma, psi, rho, eta):
    """Average risk aversion that makes observed invested wealth Merton-optimal."""
    mu, r, sigma, psi, rho, eta = map(_arr, (mu, r, sigma, psi, rho, eta))
    _require_sigma(sigma)
    c = combined_factor(rho, eta)
    return _out(1.0 - (mu - r + (psi + rho * sigma * sigma) * eta) / (sigma * sigma * c))


def wealth_dynamics(mu, sigma, psi, rho, eta):
    """Drift and volatility of the invested wealth ``pi = n * S``."""
    mu, sigma, psi, rho, eta = map(_arr, (mu, sigma, psi, rho, eta))
    c = combined_factor(rho, eta)
    if np.any(sigma < 0):
        raise VolRiskError("sigma must be nonnegative")
    return _out(mu + (psi + rho * sigma * sigma) * eta), _out(sigma * np.sqrt(c))


def impacted_drift(sigma_tilde, r, mu_gamma, alpha_rms):
    """Drift of the impacted price for a chosen volatility ``sigma_tilde``."""
    sigma_tilde = _arr(sigma_tilde)
    if not np.all(sigma_tilde > 0):
        raise NonPositiveSigmaTildeError("sigma_tilde must be strictly positive")
    return _out(_arr(r) + sigma_tilde * (1.0 - _arr(mu_gamma)) * _arr(alpha_rms))


@dataclass(frozen=True)
class ImpactedPriceParams:
    sigma_tilde: float
    mu_tilde: float


def impacted_price(sigma_tilde: float, r: float, mu_gamma: float, alpha_rms: float) -> ImpactedPriceParams:
    return ImpactedPriceParams(float(sigma_tilde), float(impacted_drift(sigma_tilde, r, mu_gamma, alpha_rms)))


class RepresentativeAgent(NamedTuple):
    mu_gamma: float | np.ndarray
    alpha_rms: float | np.ndarray


def calibrate_representative_agent(mu, r, sigma, psi, rho, eta) -> RepresentativeAgent:
    """Match the generator-process dynamics to the observed invested wealth.

    ``alpha_rms = sqrt(mu_alpha^2 + sigma_alpha^2)`` equals the wealth
    volatility, and ``r + alpha_rms^2 (1 - mu_gamma)`` equals the wealth drift.
    """
    _require_sigma(sigma)
    _, vol = wealth_dynamics(mu, sigma, psi, rho, eta)
    return RepresentativeAgent(risk_aversion(mu, r, sigma, psi, rho, eta), vol)


def girsanov_kernels(mu, r, sigma, psi, rho, eta):
    """Drift shifts of the price and volume Brownian motions under the pricing measure.

    ``eta`` cancels from the volume kernel; it is accepted to mirror the
    other signatures and must be positive.
    """
    mu, r, sigma, psi, rho, eta = map(_arr, (mu, r, sigma, psi, rho, eta))
    _require_sigma(sigma)
    if not np.all(eta > 0):
        raise VolRiskError("eta must be positive for the volume kernel")
    return _out((mu - r) / sigma), _out((psi + rho * sigma * sigma) * eta / (eta * sigma))


@dataclass(frozen=True)
class RiskMetricsPoint:
    date: date
    eta: float
    psi: float
    ratio_obs: float
    ratio_merton: float
    market_premium: float
    volume_premium: float
    market_por: float
    volume_por: float
    trading_por: float
    mu_gamma: float
    wealth_drift: float
    wealth_vol: float


METRIC_COLUMNS = tuple(f.name for f in fields(RiskMetricsPoint) if f.name != "date")


@dataclass(frozen=True)
class RiskMetrics:
    """Column-oriented table of :class:`RiskMetricsPoint` rows."""

    dates: np.ndarray
    columns: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.dates)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def points(self) -> Iterator[RiskMetricsPoint]:
        cols = [self.columns[c] for c in METRIC_COLUMNS]
        for i, d in enumerate(self.dates):
            yield RiskMetricsPoint(d.item(), *(float(c[i]) for c in cols))

    def segment(self, mask: np.ndarray) -> "RiskMetrics":
        return RiskMetrics(self.dates[mask], {k: v[mask] for k, v in self.columns.items()})


def compute_metrics(estimates: WindowedEstimates, risk_free, rho_zero: bool = False) -> RiskMetrics:
    """Derive every risk quantity for each estimate anchor.

    ``risk_free`` holds the annual yield at each anchor date (scalar or array
    aligned with ``estimates``).  With ``rho_zero`` the price/volume shock
    correlation is forced to 0 instead of using the per-window estimate.
    """
    mu, sigma = estimates.mu_price, estimates.sigma_price
    r = np.broadcast_to(_arr(risk_free), mu.shape)
    rho = np.zeros_like(mu) if rho_zero else estimates.rho

    eta, psi, _ = decompose_volume_params(estimates.mu_vol, estimates.sigma_vol, sigma)
    eta, psi = _arr(eta), _arr(psi)
    por = prices_of_risk(mu, r, sigma, psi, rho, eta)
    drift, vol = wealth_dynamics(mu, sigma, psi, rho, eta)

    cols = dict(
        eta=eta,
        psi=psi,
        ratio_obs=_arr(observed_ratio_params(estimates.mu_vol, estimates.sigma_vol)),
        ratio_merton=_arr(merton_ratio(mu, r, sigma)),
        market_premium=mu - r,
        volume_premium=psi + rho * sigma * sigma,
        market_por=_arr(por.market),
        volume_por=_arr(por.volume),
        trading_por=_arr(por.trading),
        mu_gamma=_arr(risk_aversion(mu, r, sigma, psi, rho, eta)),
        wealth_drift=_arr(drift),
        wealth_vol=_arr(vol),
    )
    return RiskMetrics(estimates.dates, {k: np.atleast_1d(cols[k]) for k in METRIC_COLUMNS})
