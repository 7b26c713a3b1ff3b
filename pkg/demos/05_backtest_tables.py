"""
Hit rates and coverage over many origins
========================================

Every feasible origin produces a forecast that is scored once the target
date arrives.  The first table counts how often the predicted side of the
trendline was right; the second compares empirical with nominal coverage.
Pass an output directory to also write the indicator and band charts.
"""

import sys
from pathlib import Path

from diffcast import BacktestConfig, ForecastConfig, SmootherConfig, sweep_report
from diffcast.svg import Band, Chart, Line, render
from diffcast.synthetic import synthetic_market

market = synthetic_market()
config = BacktestConfig(smoother=SmootherConfig(100, 2), fc=ForecastConfig(horizon=5, ma_window=100))
reports = sweep_report(market.series, config, [5, 10])

print("hit rate (%)")
print("  h   " + "".join(f"N={N:<7d}" for N in config.ma_windows))
for r in reports:
    print(f"  {r.horizon:<3d} " + "".join(f"{r.per_window_hit_rate[N]:<9.1f}" for N in config.ma_windows))

print("\ncoverage (%), N=100")
for r in reports:
    for k, (nominal, empirical) in r.per_k_coverage.items():
        print(f"  h={r.horizon:<3d} k={k:g}: nominal {nominal:.0f}, empirical {empirical:.1f}")

print(f"\nrmse of the trendline forecast: " + ", ".join(f"h={r.horizon}: {r.rmse_trendline:.5f}" for r in reports))

if len(sys.argv) > 1:
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    r = reports[0]
    recs = r.records[100]
    x = [rec.target for rec in recs]
    chart = Chart(title="mean ± 2 MSTD, 5 ahead", x_label="t", y_label="value",
                  lines=[Line("realized", x, list(r.realized))],
                  bands=[Band("±2 MSTD", x, [rec.interval(2.0)[0] for rec in recs],
                              [rec.interval(2.0)[1] for rec in recs])])
    (out / "bands.svg").write_text(render(chart))
    print("wrote", out / "bands.svg")
