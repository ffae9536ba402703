"""Rolling GBM fits on the bundled price/volume fixture and the risk quantities they imply.

The fixture was generated from the joint price/volume model with
mu=0.10, r=0.02, sigma=0.2, psi=0.04, rho=0, eta=3, so every derived
quantity has a known value to compare against.
"""

import math

import numpy as np

from volrisk import analyze, data_path, load_series

series = load_series(data_path("synthetic_prices.csv"), data_path("synthetic_rates.csv"))
print(f"{len(series)} trading days, {series.dates[0]} .. {series.dates[-1]}")

res = analyze(series, window=125)
est = res.estimates
print(f"{len(est)} rolling windows of 125 log increments")

# window-level parameter estimates are noisy; their averages sit near the truth
for name, truth in (("mu_price", 0.10), ("sigma_price", 0.2), ("mu_vol", 0.12), ("sigma_vol", 0.6)):
    v = getattr(est, name)
    print(f"  {name:12s} mean {v.mean():+.4f}  sd {v.std():.4f}  (model {truth})")
print(f"  rho          mean {est.rho.mean():+.4f}  share with p<0.05: {(est.rho_pvalue < 0.05).mean():.2f}")

# derived quantities, one intercept-only regression per metric
expect = dict(eta=3.0, psi=0.04, ratio_obs=0.2, ratio_merton=0.2, market_por=0.4, volume_por=0.2,
              trading_por=0.2 / (0.2 * math.sqrt(10)), mu_gamma=0.5, wealth_drift=0.22,
              wealth_vol=0.2 * math.sqrt(10))
print("\nsegment means (whole sample)")
for s in res.segments:
    if s.metric in expect:
        print(f"  {s.metric:13s} {s.fit.intercept:+.4f} +/- {s.fit.std_error:.4f}   model {expect[s.metric]:+.4f}")

# the KS p-values on log levels inside each window
t = res.tests
print(f"\nKS on log price levels: median p {np.median(t.ks_p_logprice):.3f}, "
      f"rejections at 5%: {(t.ks_p_logprice < 0.05).mean():.2f}")
