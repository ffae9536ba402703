"""One-day-ahead forecasts from rolling estimates, in both modes.

Reconstruction mode feeds the realized shock back through the fitted GBM
step, so it reproduces the observed close; it only checks that estimates
and data are consistent.  Point mode uses S_t exp(mu dt) and is the real
out-of-sample forecast.
"""

import math

from volrisk import data_path, forecast_diagnostics, load_series, one_day_ahead, rolling_fit

series = load_series(data_path("synthetic_prices.csv"), data_path("synthetic_rates.csv"))
est = rolling_fit(series, window=125)

for mode in ("reconstruction", "point"):
    pts = one_day_ahead(series, est, mode=mode)
    d = forecast_diagnostics(pts)
    print(f"{mode:15s} n={len(pts)}  MAE {d.mae_rel:.5f}  RMSE {d.rmse_rel:.5f}  hit rate {d.hit_rate:.3f}")

# a lognormal one-day move with sigma=0.2 has mean absolute size close to sigma sqrt(dt) sqrt(2/pi)
print(f"\nsigma sqrt(dt) sqrt(2/pi) = {0.2 * math.sqrt(1 / 252) * math.sqrt(2 / math.pi):.5f}")
