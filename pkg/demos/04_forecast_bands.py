"""
A single forecast with its confidence intervals
===============================================

At a given origin the trendline, the moving average of the residual and the
moving standard deviation are each extrapolated h steps.  The intervals
are centered at trendline + MA with half width k times the forecast MSTD.
"""

from diffcast import ForecastConfig, IdentificationConfig, SmootherConfig, forecast_series
from diffcast.synthetic import synthetic_market

market = synthetic_market()
series = market.series
fc = ForecastConfig(horizon=5, ma_window=100)

for origin in (1000, 1800):
    rec = forecast_series(series, IdentificationConfig(), SmootherConfig(100, 2), fc, origin)
    print(f"\norigin {series.label_at(origin)} -> target {series.label_at(rec.target)}")
    print(f"  trendline forecast {rec.trendline_forecast:.5f}")
    print(f"  residual MA forecast {rec.ma_forecast:+.6f} ({rec.indicator.value} {rec.indicator.glyph})")
    print(f"  MSTD forecast {rec.mstd_forecast:.6f}")
    for k, lo, hi in rec.intervals:
        print(f"  k={k:g}: [{lo:.5f}, {hi:.5f}]")
    print(f"  realized {series.at(rec.target):.5f}")

# the noise level doubles at the break, and so does the band width
