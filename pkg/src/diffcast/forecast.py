"""h-step-ahead forecasts of the trendline, the residual moving average and MSTD.

The same identify-and-iterate step is applied to three series: the smoothed
trendline, the trailing moving average of the residuals, and their trailing
moving standard deviation.  Every window is trailing, so a forecast made at
time ``t`` never reads a sample after ``t``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    ConfigurationError,
    DegenerateInputError,
    DifferenceEquationModel,
    DomainError,
    TimeSeries,
    decompose,
)
from .estimate import IdentificationConfig, SmootherConfig, identify_values, smooth_values


class Indicator(str, enum.Enum):
    ABOVE = "above"
    UNDER = "under"

    @classmethod
    def of(cls, value: float) -> "Indicator":
        return cls.ABOVE if value >= 0 else cls.UNDER

    @property
    def glyph(self) -> str:
        return "∇" if self is Indicator.ABOVE else "△"


@dataclass(frozen=True)
class ForecastConfig:
    horizon: int = 5
    ma_window: int = 100
    interval_multipliers: tuple[float, ...] = (1.0, 2.0, 3.0)

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        if self.ma_window < 1:
            raise ConfigurationError(f"ma_window must be >= 1, got {self.ma_window}")
        ks = tuple(float(k) for k in self.interval_multipliers)
        if not ks or any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigurationError(
                f"interval multipliers must be positive and strictly ascending, got {ks}"
            )
        object.__setattr__(self, "interval_multipliers", ks)


@dataclass(frozen=True)
class ForecastRecord:
    origin: int
    target: int
    trendline_forecast: float
    ma_forecast: float
    mstd_forecast: float
    indicator: Indicator
    intervals: tuple[tuple[float, float, float], ...]
    ma_window: int = 0
    coefficients: tuple[float, ...] = field(default=(), compare=True)

    @property
    def center(self) -> float:
        return self.trendline_forecast + self.ma_forecast

    def interval(self, k: float) -> tuple[float, float]:
        for kk, lo, hi in self.intervals:
            if kk == k:
                return lo, hi
        raise KeyError(k)

    def to_dict(self) -> dict:
        return {
            "origin": self.origin,
            "target": self.target,
            "ma_window": self.ma_window,
            "trendline_forecast": self.trendline_forecast,
            "ma_forecast": self.ma_forecast,
            "mstd_forecast": self.mstd_forecast,
            "indicator": self.indicator.value,
            "intervals": [{"k": k, "lower": lo, "upper": hi} for k, lo, hi in self.intervals],
            "coefficients": list(self.coefficients),
        }


def iterate_forecast(model: DifferenceEquationModel, seed: Sequence[float],
                     horizon: int) -> list[float]:
    """Run the recursion forward ``horizon`` steps from ``seed`` (oldest first)."""
    if len(seed) != model.order:
        raise DomainError(f"seed needs exactly {model.order} values, got {len(seed)}")
    buf = [float(v) for v in seed]
    a = model.coefficients
    out = []
    for _ in range(horizon):
        nxt = 0.0
        for i, ai in enumerate(a, start=1):
            nxt += ai * buf[-i]
        buf.append(nxt)
        out.append(nxt)
    return out


def _trailing_sum(x: np.ndarray, width: int) -> np.ndarray:
    m = len(x) - width + 1
    out = np.zeros(max(m, 0))
    for j in range(width):
        out += x[j:j + m]
    return out


def ma_values(nu: np.ndarray, N: int) -> np.ndarray:
    """``out[i]`` is the mean of ``nu[i : i+N+1]``."""
    return _trailing_sum(np.asarray(nu, dtype=float), N + 1) / (N + 1)


def mstd_values(nu: np.ndarray, N: int) -> np.ndarray:
    """``out[i]`` is the RMS deviation of ``nu[i+N : i+2N+1]`` from their own MAs."""
    nu = np.asarray(nu, dtype=float)
    dev = nu[N:] - ma_values(nu, N)
    return np.sqrt(_trailing_sum(dev * dev, N + 1) / (N + 1))


def moving_average(residual: TimeSeries, N: int) -> TimeSeries:
    """Trailing (N+1)-term mean; the output starts N samples after the input."""
    if N < 0:
        raise ConfigurationError("N must be non-negative")
    if len(residual) < N + 1:
        raise DomainError(f"moving average with N={N} needs {N + 1} samples, got {len(residual)}")
    return TimeSeries(ma_values(residual.values, N), residual.start_index + N)


def moving_std(residual: TimeSeries, N: int) -> TimeSeries:
    """Trailing moving standard deviation about the contemporaneous moving average.

    The value at ``t`` is ``sqrt(mean_{tau=0..N} (nu(t-tau) - MA(t-tau))**2)``,
    so it needs ``2N + 1`` samples and starts ``2N`` after the input.
    """
    if N < 0:
        raise ConfigurationError("N must be non-negative")
    if len(residual) < 2 * N + 1:
        raise DomainError(f"moving std with N={N} needs {2 * N + 1} samples, got {len(residual)}")
    return TimeSeries(mstd_values(residual.values, N), residual.start_index + 2 * N)


def forecast_window(values: np.ndarray, ident: IdentificationConfig, horizon: int):
    """Identify on the trailing L values and iterate; returns ``(x_hat(t+h), model)``.

    An all-zero window has no regressor; its forecast is 0 and the model is None.
    """
    window = np.asarray(values[-ident.window:], dtype=float)
    try:
        model = identify_values(window, ident)
    except DegenerateInputError:
        return 0.0, None
    path = iterate_forecast(model, window[-ident.order:], horizon)
    return path[-1], model


def required_history(ident: IdentificationConfig, smoother: SmootherConfig, N: int) -> dict:
    """Samples needed up to and including the origin, per constraint."""
    return {
        "smoother window W": smoother.window,
        "identification window L": ident.window,
        "moving-average window (N + L)": N + ident.window,
        "moving-std window (2N + L)": 2 * N + ident.window,
    }


def _check_history(available: int, ident, smoother, N: int) -> None:
    need = required_history(ident, smoother, N)
    name, count = max(need.items(), key=lambda kv: kv[1])
    if available < count:
        raise DomainError(
            f"forecast origin has {available} samples of history; the {name} needs {count}"
        )


def _assemble(origin: int, fc: ForecastConfig, trend: float, ma: float, mstd: float,
              N: int, coefficients=()) -> ForecastRecord:
    mstd = max(mstd, 0.0)
    center = trend + ma
    intervals = tuple((k, center - k * mstd, center + k * mstd) for k in fc.interval_multipliers)
    return ForecastRecord(
        origin=origin,
        target=origin + fc.horizon,
        trendline_forecast=trend,
        ma_forecast=ma,
        mstd_forecast=mstd,
        indicator=Indicator.of(ma),
        intervals=intervals,
        ma_window=N,
        coefficients=tuple(coefficients),
    )


class _Precomputed:
    """Smoothed series, residual MA and MSTD for one data set, computed once."""

    def __init__(self, raw: np.ndarray, trend: np.ndarray):
        self.raw = raw
        self.trend = trend
        self.nu = raw - trend
        self._ma: dict[int, np.ndarray] = {}
        self._mstd: dict[int, np.ndarray] = {}

    def ma(self, N: int) -> np.ndarray:
        if N not in self._ma:
            self._ma[N] = ma_values(self.nu, N)
        return self._ma[N]

    def mstd(self, N: int) -> np.ndarray:
        if N not in self._mstd:
            self._mstd[N] = mstd_values(self.nu, N)
        return self._mstd[N]

    def record(self, pos: int, origin: int, ident: IdentificationConfig,
               fc: ForecastConfig, N: int, trend_part=None) -> ForecastRecord:
        """Forecast at array position ``pos`` (time ``origin``)."""
        h = fc.horizon
        if trend_part is None:
            trend_part = forecast_window(self.trend[:pos + 1], ident, h)
        trend_fc, model = trend_part
        ma_fc, _ = forecast_window(self.ma(N)[:pos - N + 1], ident, h)
        mstd_fc, _ = forecast_window(self.mstd(N)[:pos - 2 * N + 1], ident, h)
        coeffs = model.coefficients if model is not None else ()
        return _assemble(origin, fc, trend_fc, ma_fc, mstd_fc, N, coeffs)


def forecast_from_trendline(raw: TimeSeries, trendline: TimeSeries,
                            ident: IdentificationConfig, fc: ForecastConfig,
                            origin: int) -> ForecastRecord:
    """Forecast at ``origin`` against an externally supplied trendline."""
    dec = decompose(raw, trendline)
    pos = origin - raw.start_index
    if not 0 <= pos < len(raw):
        raise DomainError(f"origin {origin} outside [{raw.start_index}, {raw.end_index}]")
    _check_history(pos + 1, ident, SmootherConfig(1, 0), fc.ma_window)
    pre = _Precomputed(raw.values[:pos + 1], dec.trendline.values[:pos + 1])
    return pre.record(pos, origin, ident, fc, fc.ma_window)


def forecast_series(series: TimeSeries, ident: IdentificationConfig = IdentificationConfig(),
                    smoother: SmootherConfig = SmootherConfig(),
                    fc: ForecastConfig = ForecastConfig(),
                    origin: Optional[int] = None) -> ForecastRecord:
    """Forecast made at ``origin`` (default: the last sample) for ``origin + h``.

    Only samples up to ``origin`` are read.  The trendline is the causal
    smoother output; the residual moving average and moving standard
    deviation are forecast with the same order and window as the trendline.
    """
    if origin is None:
        origin = series.end_index
    pos = origin - series.start_index
    if not 0 <= pos < len(series):
        raise DomainError(f"origin {origin} outside [{series.start_index}, {series.end_index}]")
    _check_history(pos + 1, ident, smoother, fc.ma_window)
    raw = series.values[:pos + 1]
    pre = _Precomputed(raw, smooth_values(raw, smoother))
    return pre.record(pos, origin, ident, fc, fc.ma_window)


def rolling_forecast(series: TimeSeries, ident: IdentificationConfig = IdentificationConfig(),
                     smoother: SmootherConfig = SmootherConfig(),
                     fc: ForecastConfig = ForecastConfig(),
                     origins: Optional[Iterable[int]] = None,
                     ma_windows: Optional[Sequence[int]] = None) -> dict[int, list[ForecastRecord]]:
    """Forecasts at many origins sharing one pass of smoothing and windowing.

    Returns ``{N: [record per origin]}`` for every moving-average window in
    ``ma_windows`` (default: just ``fc.ma_window``).  Records are identical to
    what :func:`forecast_series` gives on the series truncated at each origin.
    """
    windows = list(ma_windows) if ma_windows is not None else [fc.ma_window]
    if not windows:
        raise ConfigurationError("at least one moving-average window is required")
    widest = max(windows)
    first = series.start_index + max(required_history(ident, smoother, widest).values()) - 1
    if origins is None:
        origins = range(first, series.end_index + 1)
    origins = list(origins)
    for t in origins:
        if t > series.end_index:
            raise DomainError(f"origin {t} is past the end of the series ({series.end_index})")
        _check_history(t - series.start_index + 1, ident, smoother, widest)
    pre = _Precomputed(series.values, smooth_values(series.values, smoother))
    out: dict[int, list[ForecastRecord]] = {N: [] for N in windows}
    for t in origins:
        pos = t - series.start_index
        trend_part = forecast_window(pre.trend[:pos + 1], ident, fc.horizon)
        for N in windows:
            out[N].append(pre.record(pos, t, ident, fc, N, trend_part))
    return out
