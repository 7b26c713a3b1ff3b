"""Rolling evaluation: sign hit rates per MA window and interval coverage per k."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import ConfigurationError, DomainError, TimeSeries
from .estimate import IdentificationConfig, SmootherConfig, smooth_values
from .forecast import (
    ForecastConfig,
    ForecastRecord,
    Indicator,
    required_history,
    rolling_forecast,
)

# Nominal coverage printed alongside mean +/- k std; other k fall back to Gaussian.
NOMINAL_COVERAGE = {1.0: 68.0, 2.0: 95.0, 3.0: 99.0}


def nominal_coverage(k: float) -> float:
    if k in NOMINAL_COVERAGE:
        return NOMINAL_COVERAGE[k]
    return 100.0 * math.erf(k / math.sqrt(2.0))


@dataclass(frozen=True)
class BacktestConfig:
    ident: IdentificationConfig = IdentificationConfig()
    smoother: SmootherConfig = SmootherConfig()
    fc: ForecastConfig = ForecastConfig()
    ma_windows: tuple[int, ...] = (50, 100, 200, 300)
    start: Optional[int] = None
    stride: int = 1
    # Closed-interval containment with a relative slack for rounding; only
    # matters for degenerate (zero-width) intervals.
    containment_rtol: float = 1e-9

    def __post_init__(self):
        ws = tuple(int(n) for n in self.ma_windows)
        if not ws or any(b <= a for a, b in zip(ws, ws[1:])) or ws[0] < 1:
            raise ConfigurationError(f"ma_windows must be positive and strictly ascending, got {ws}")
        object.__setattr__(self, "ma_windows", ws)
        if self.stride < 1:
            raise ConfigurationError(f"stride must be >= 1, got {self.stride}")

    @property
    def evaluated_windows(self) -> tuple[int, ...]:
        """Sweep windows plus the interval window ``fc.ma_window``."""
        return tuple(sorted(set(self.ma_windows) | {self.fc.ma_window}))

    def to_dict(self) -> dict:
        return {
            "order": self.ident.order,
            "L": self.ident.window,
            "rank_tolerance": self.ident.rank_tolerance,
            "W": self.smoother.window,
            "d": self.smoother.degree,
            "horizon": self.fc.horizon,
            "ma_window": self.fc.ma_window,
            "interval_multipliers": list(self.fc.interval_multipliers),
            "ma_windows": list(self.ma_windows),
            "start": self.start,
            "stride": self.stride,
            "containment_rtol": self.containment_rtol,
        }


@dataclass
class BacktestReport:
    horizon: int
    n_forecasts: int
    per_window_hit_rate: dict[int, float]
    per_window_hits: dict[int, int]
    per_k_coverage: dict[float, tuple[float, float]]
    rmse_trendline: float
    coverage_window: int
    origins: tuple[int, ...]
    realized: tuple[float, ...] = ()
    realized_trendline: tuple[float, ...] = ()
    records: dict[int, list[ForecastRecord]] = field(default_factory=dict, repr=False)

    def misses(self, N: int) -> int:
        return self.n_forecasts - self.per_window_hits[N]

    def table1_rows(self) -> list[dict]:
        return [{"horizon": self.horizon, "window": N, "hit_rate": rate,
                 "hits": self.per_window_hits[N], "n_forecasts": self.n_forecasts}
                for N, rate in self.per_window_hit_rate.items()]

    def table2_rows(self) -> list[dict]:
        return [{"horizon": self.horizon, "k": k, "nominal": nom, "empirical": emp,
                 "ma_window": self.coverage_window}
                for k, (nom, emp) in self.per_k_coverage.items()]

    def to_dict(self, include_records: bool = False) -> dict:
        out = {
            "horizon": self.horizon,
            "n_forecasts": self.n_forecasts,
            "rmse_trendline": self.rmse_trendline,
            "coverage_window": self.coverage_window,
            "first_origin": self.origins[0] if self.origins else None,
            "last_origin": self.origins[-1] if self.origins else None,
            "hit_rate": [{"window": r["window"], "percent": r["hit_rate"], "hits": r["hits"]}
                         for r in self.table1_rows()],
            "coverage": [{"k": r["k"], "nominal": r["nominal"], "empirical": r["empirical"]}
                         for r in self.table2_rows()],
        }
        if include_records:
            out["records"] = {
                str(N): [dict(rec.to_dict(), realized=x)
                         for rec, x in zip(recs, self.realized)]
                for N, recs in self.records.items()
            }
        return out


def backtest_origins(series: TimeSeries, config: BacktestConfig,
                     max_horizon: Optional[int] = None) -> list[int]:
    """Origins on the stride grid with full history and a realized target.

    The grid is anchored at ``config.start`` and warm-up origins (not enough
    history for the widest MA window) are dropped, so every window is scored
    on the same set.
    """
    h = max_horizon if max_horizon is not None else config.fc.horizon
    need = max(required_history(config.ident, config.smoother,
                                max(config.evaluated_windows)).values())
    feasible = series.start_index + need - 1
    start = config.start if config.start is not None else feasible
    last = series.end_index - h
    return [t for t in range(start, last + 1, config.stride) if t >= feasible]


def run_backtest(series: TimeSeries, config: BacktestConfig = BacktestConfig(),
                 origins: Optional[Sequence[int]] = None) -> BacktestReport:
    """Score forecasts at every origin against what was realized ``h`` steps later.

    A sign hit means the predicted MA sign matches the sign of
    ``x(t+h) - trendline(t+h)``, the trendline being the causal smoother
    output once data through ``t+h`` exists (zero counts as above).
    Coverage counts realizations inside the closed ``k``-interval built
    with ``fc.ma_window``.
    """
    if origins is None:
        origins = backtest_origins(series, config)
    origins = list(origins)
    if not origins:
        need = max(required_history(config.ident, config.smoother,
                                    max(config.evaluated_windows)).values())
        raise DomainError(
            f"series of length {len(series)} leaves no forecast origin: "
            f"{need} samples of history plus horizon {config.fc.horizon} are required"
        )
    h = config.fc.horizon
    windows = config.evaluated_windows
    records = rolling_forecast(series, config.ident, config.smoother, config.fc,
                               origins=origins, ma_windows=windows)

    trend = smooth_values(series.values, config.smoother)
    pos = np.asarray(origins) - series.start_index + h
    realized = series.values[pos]
    realized_trend = trend[pos]
    realized_side = [Indicator.of(d) for d in realized - realized_trend]
    n = len(origins)

    hits = {N: sum(rec.indicator is side for rec, side in zip(records[N], realized_side))
            for N in config.ma_windows}
    hit_rate = {N: 100.0 * hits[N] / n for N in config.ma_windows}

    coverage: dict[float, tuple[float, float]] = {}
    cov_recs = records[config.fc.ma_window]
    for k in config.fc.interval_multipliers:
        inside = 0
        for rec, x in zip(cov_recs, realized):
            lo, hi = rec.interval(k)
            slack = config.containment_rtol * max(abs(lo), abs(hi), abs(x))
            inside += (lo - slack) <= x <= (hi + slack)
        coverage[k] = (nominal_coverage(k), 100.0 * inside / n)

    trend_fc = np.array([rec.trendline_forecast for rec in cov_recs])
    rmse = float(np.sqrt(np.mean((trend_fc - realized) ** 2)))

    return BacktestReport(
        horizon=h,
        n_forecasts=n,
        per_window_hit_rate=hit_rate,
        per_window_hits=hits,
        per_k_coverage=coverage,
        rmse_trendline=rmse,
        coverage_window=config.fc.ma_window,
        origins=tuple(origins),
        realized=tuple(float(v) for v in realized),
        realized_trendline=tuple(float(v) for v in realized_trend),
        records={N: records[N] for N in windows},
    )


def sweep_report(series: TimeSeries, config: BacktestConfig,
                 horizons: Sequence[int]) -> list[BacktestReport]:
    """One report per horizon, all scored on the origins feasible for the longest."""
    horizons = list(horizons)
    if not horizons:
        return []
    origins = backtest_origins(series, config, max_horizon=max(horizons))
    return [
        run_backtest(series, replace(config, fc=replace(config.fc, horizon=h)), origins)
        for h in horizons
    ]
