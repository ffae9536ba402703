"""Model-generated price/volume series for tests, demos and bundled fixtures."""

from __future__ import annotations

import math

import numpy as np

from .market_data import DAY, AlignedSeries


def business_days(n: int, start: str = "2000-01-03") -> np.ndarray:
    return np.busday_offset(np.datetime64(start, "D"), np.arange(n), roll="forward")


def _shocks(rng: np.random.Generator, shape, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return rng.standard_normal(shape)
    # consecutive pairs (z, -z)
    n = shape[-1]
    half = rng.standard_normal(shape[:-1] + ((n + 1) // 2,))
    out = np.stack([half, -half], axis=-1).reshape(shape[:-1] + (-1,))
    return out[..., :n]


def gbm_paths(n_steps: int, mu: float, sigma: float, dt: float = DAY, s0: float = 1.0,
              n_paths: int | None = None, seed: int | None = 0) -> np.ndarray:
    """Exact GBM samples; ``n_steps + 1`` points per path including ``s0``."""
    rng = np.random.default_rng(seed)
    shape = (n_steps,) if n_paths is None else (n_paths, n_steps)
    inc = (mu - 0.5 * sigma * sigma) * dt + sigma * math.sqrt(dt) * rng.standard_normal(shape)
    lead = np.zeros(shape[:-1] + (1,))
    return s0 * np.exp(np.concatenate([lead, np.cumsum(inc, axis=-1)], axis=-1))


def simulate_market(n_days: int, mu: float, sigma: float, psi: float, eta: float, rho: float = 0.0,
                    r: float = 0.02, s0: float = 100.0, n0: float = 1e6, dt: float = DAY,
                    seed: int | None = 0, antithetic: bool = False,
                    start: str = "2000-01-03") -> AlignedSeries:
    """Daily prices and volumes from the joint price/volume model.

    Price:  dS = S (mu dt + sigma dZ)
    Volume: dn = n eta (psi dt + sigma dQ),  corr(dZ, dQ) = rho

    Both are stepped exactly in logs.  With ``antithetic=True`` the shocks
    come in ``(z, -z)`` pairs, which keeps every marginal exact while cutting
    the sampling noise of window means.
    """
    rng = np.random.default_rng(seed)
    z = _shocks(rng, (2, n_days - 1), antithetic)
    dz = z[0]
    dq = rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1]
    sd = math.sqrt(dt)
    sig_v = eta * sigma
    log_s = (mu - 0.5 * sigma ** 2) * dt + sigma * sd * dz
    log_n = (eta * psi - 0.5 * sig_v ** 2) * dt + sig_v * sd * dq
    prices = s0 * np.exp(np.concatenate([[0.0], np.cumsum(log_s)]))
    volumes = n0 * np.exp(np.concatenate([[0.0], np.cumsum(log_n)]))
    return AlignedSeries(business_days(n_days, start), prices, volumes, np.full(n_days, float(r)))


def write_fixture(out_dir, n_days: int = 1008, seed: int = 7, antithetic: bool = True,
                  **model) -> tuple:
    """Write a model-generated ``prices.csv``/``rates.csv`` pair.

    Defaults reproduce the bundled fixture: mu=0.10, r=0.02, sigma=0.2,
    psi=0.04, rho=0, eta=3, for which the average risk aversion is 0.5 and
    the trading price of risk 0.2 / (0.2 sqrt(10)).  Rates are written on the
    first business day of each month only, to exercise forward filling.
    """
    from pathlib import Path

    from .market_data import RiskFreeRecord, write_observations, write_risk_free

    params = dict(mu=0.10, sigma=0.2, psi=0.04, eta=3.0, rho=0.0, r=0.02)
    params.update(model)
    s = simulate_market(n_days, seed=seed, antithetic=antithetic, **params)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prices, rates = out / "synthetic_prices.csv", out / "synthetic_rates.csv"
    write_observations(s.records(), prices)
    months = s.dates.astype("datetime64[M]")
    first = np.concatenate([[True], months[1:] != months[:-1]])
    write_risk_free((RiskFreeRecord(d.item(), float(y)) for d, y in zip(s.dates[first], s.risk_free[first])), rates)
    return prices, rates
