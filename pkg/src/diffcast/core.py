"""Shared data types and elementary series operations.

Time is a plain integer index. Calendar dates ride along as opaque labels
and are never interpreted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class DiffcastError(Exception):
    """Base class for all library errors."""


class RangeError(DiffcastError, IndexError):
    pass


class AlignmentError(DiffcastError, ValueError):
    pass


class DomainError(DiffcastError, ValueError):
    pass


class ConfigurationError(DiffcastError, ValueError):
    pass


class DegenerateInputError(DiffcastError, ValueError):
    pass


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly indexed real observations.

    The value at time ``t`` sits at position ``t - start_index``.
    """

    values: np.ndarray
    start_index: int = 0
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        object.__setattr__(self, "start_index", int(self.start_index))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(self.values):
                raise AlignmentError(
                    f"{len(labels)} labels for {len(self.values)} values"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.start_index == other.start_index
            and self.labels == other.labels
            and np.array_equal(self.values, other.values)
        )

    @property
    def end_index(self) -> int:
        """Last time index covered (inclusive)."""
        return self.start_index + len(self.values) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + len(self.values))

    def at(self, t: int) -> float:
        if not self.start_index <= t <= self.end_index:
            raise RangeError(
                f"time {t} outside [{self.start_index}, {self.end_index}]"
            )
        return float(self.values[t - self.start_index])

    def label_at(self, t: int) -> Optional[str]:
        if self.labels is None:
            return None
        return self.labels[t - self.start_index]

    def with_values(self, values) -> "TimeSeries":
        """Same index range and labels, new values."""
        return TimeSeries(values, self.start_index, self.labels)


@dataclass(frozen=True)
class DifferenceEquationModel:
    """Locally identified recursion ``x(t+n) = a_1 x(t+n-1) + ... + a_n x(t)``.

    ``condition_number`` is the ratio of the extreme singular values of the
    regressor (``inf`` when it is rank deficient to machine precision) and
    ``rank`` is the number of singular values retained by the solve.
    """

    order: int
    coefficients: tuple[float, ...]
    condition_number: float
    window_origin: int
    rank: int = field(default=-1)

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if self.order < 1:
            raise ConfigurationError(f"order must be positive, got {self.order}")
        if len(coeffs) != self.order:
            raise ConfigurationError(
                f"{len(coeffs)} coefficients for a model of order {self.order}"
            )
        if not (self.condition_number >= 1.0 or math.isnan(self.condition_number)):
            raise ValueError(f"condition number {self.condition_number} < 1")
        if self.rank < 0:
            object.__setattr__(self, "rank", self.order)

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.order

    def predict_next(self, history: Sequence[float]) -> float:
        """One-step prediction from the last ``order`` values (oldest first)."""
        tail = np.asarray(history, dtype=float)[-self.order:][::-1]
        return float(np.dot(self.coefficients, tail))


@dataclass(frozen=True)
class ResidualDecomposition:
    trendline: TimeSeries
    residual: TimeSeries

    @property
    def start_index(self) -> int:
        return self.trendline.start_index


def slice_series(series: TimeSeries, start: int, length: int) -> TimeSeries:
    """Contiguous sub-series covering ``[start, start + length)``."""
    if length < 1:
        raise RangeError(f"length must be positive, got {length}")
    lo = start - series.start_index
    hi = lo + length
    if lo < 0 or hi > len(series):
        raise RangeError(
            f"requested [{start}, {start + length - 1}] but the series spans "
            f"[{series.start_index}, {series.end_index}]"
        )
    labels = series.labels[lo:hi] if series.labels is not None else None
    return TimeSeries(series.values[lo:hi], start, labels)


def truncate(series: TimeSeries, last: int) -> TimeSeries:
    """Everything up to and including time ``last``."""
    return slice_series(series, series.start_index, last - series.start_index + 1)


def decompose(raw: TimeSeries, trendline: TimeSeries) -> ResidualDecomposition:
    """Split ``raw`` into ``trendline + residual``."""
    if raw.start_index != trendline.start_index or len(raw) != len(trendline):
        raise AlignmentError(
            f"raw covers [{raw.start_index}, {raw.end_index}] but trendline "
            f"covers [{trendline.start_index}, {trendline.end_index}]"
        )
    residual = TimeSeries(raw.values - trendline.values, raw.start_index, raw.labels)
    return ResidualDecomposition(trendline=trendline, residual=residual)
