"""Synthetic series: exact recursions and an exchange-rate-like test market."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TimeSeries


def recursion_values(coefficients: Sequence[float], initials: Sequence[float],
                     length: int) -> np.ndarray:
    """``x(t+n) = a_1 x(t+n-1) + ... + a_n x(t)`` in floating point."""
    a = [float(v) for v in coefficients]
    x = [float(v) for v in initials]
    while len(x) < length:
        x.append(sum(ai * x[-i] for i, ai in enumerate(a, start=1)))
    return np.array(x[:length])


def coefficients_from_roots(roots: Sequence[complex]) -> np.ndarray:
    """Recursion coefficients whose characteristic polynomial has ``roots``."""
    poly = np.real_if_close(np.poly(roots))
    return -np.asarray(poly[1:], dtype=float)


@dataclass(frozen=True)
class SyntheticMarket:
    series: TimeSeries
    trend: np.ndarray
    sigma: np.ndarray
    break_index: int


def synthetic_market(seed: int = 2008, length: int = 2400, level: float = 1.25,
                     amplitude: float = 0.15, periods: tuple[float, float] = (600.0, 400.0),
                     sigma: float = 0.001, noise_memory: float = 0.0,
                     break_index: int | None = None,
                     first_day: str = "2000-01-03") -> SyntheticMarket:
    """Daily-rate-like series: slow cycle with drifting period plus noise whose std doubles.

    The trend is ``level + amplitude * sin(phase(t))`` where the phase speed
    drifts between the two ``periods``.  Locally this is the order-3
    recursion with characteristic roots ``1, exp(+-i omega(t))``, i.e.
    coefficients ``(1 + 2 cos w, -(1 + 2 cos w), 1)`` that vary slowly in
    time.  The noise is zero-mean Gaussian (optionally AR(1) with
    coefficient ``noise_memory``, rescaled to unit variance) with standard
    deviation ``sigma`` before ``break_index`` and ``2 * sigma`` from it on.
    Labels are weekday dates starting at ``first_day``.
    """
    rng = np.random.default_rng(seed)
    if break_index is None:
        break_index = length // 2
    t = np.arange(length, dtype=float)
    p0, p1 = periods
    period = p0 + (p1 - p0) * (1 - np.cos(np.pi * t / length)) / 2
    phase = np.cumsum(2 * np.pi / period)
    trend = level + amplitude * np.sin(phase)

    white = rng.standard_normal(length)
    if noise_memory:
        e = np.empty(length)
        e[0] = white[0]
        scale = np.sqrt(1 - noise_memory ** 2)
        for i in range(1, length):
            e[i] = noise_memory * e[i - 1] + scale * white[i]
        white = e
    sd = np.where(t < break_index, sigma, 2 * sigma)
    values = trend + sd * white
    days = np.busday_offset(np.datetime64(first_day, "D"), np.arange(length), roll="forward")
    labels = [str(d) for d in days]
    return SyntheticMarket(TimeSeries(values, 0, labels), trend, sd, break_index)
