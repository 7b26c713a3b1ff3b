"""Causal smoothing and sliding-window identification of difference equations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import (
    ConfigurationError,
    DegenerateInputError,
    DifferenceEquationModel,
    DomainError,
    TimeSeries,
)


@dataclass(frozen=True)
class SmootherConfig:
    """Right-endpoint local polynomial smoother: ``window`` samples, ``degree`` fit."""

    window: int = 20
    degree: int = 2

    def __post_init__(self):
        if self.window < 1:
            raise ConfigurationError(f"smoother window must be >= 1, got {self.window}")
        if not 0 <= self.degree < self.window:
            raise ConfigurationError(
                f"smoother degree must satisfy 0 <= d < W, got d={self.degree}, W={self.window}"
            )


@dataclass(frozen=True)
class IdentificationConfig:
    order: int = 3
    window: int = 45
    rank_tolerance: float = 1e-10

    def __post_init__(self):
        if self.order < 1:
            raise ConfigurationError(f"order must be >= 1, got {self.order}")
        if self.window < 2 * self.order:
            raise ConfigurationError(
                f"identification window L={self.window} must be at least 2n={2 * self.order}"
            )
        if self.rank_tolerance < 0:
            raise ConfigurationError("rank_tolerance must be non-negative")

    @property
    def rows(self) -> int:
        return self.window - self.order


@lru_cache(maxsize=None)
def endpoint_weights(window: int, degree: int) -> np.ndarray:
    """Weights ``w`` such that ``w @ x[-window:]`` is the fitted value at the last sample.

    The abscissae are ``-(window-1), ..., 0`` so the endpoint value is the
    constant term of the least-squares polynomial.
    """
    degree = min(degree, window - 1)
    s = np.arange(-(window - 1), 1, dtype=float)
    V = np.vander(s, degree + 1, increasing=True)
    w = np.linalg.pinv(V)[0]
    w.setflags(write=False)
    return w


def sliding_dot(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``out[i] = weights @ x[i:i+len(weights)]`` accumulated elementwise.

    A BLAS matrix-vector product may block differently for different array
    lengths; accumulating term by term keeps every output bit-identical no
    matter how much later data is present.
    """
    m = len(x) - len(weights) + 1
    out = np.zeros(max(m, 0))
    for j, w in enumerate(weights):
        out += w * x[j:j + m]
    return out


def smooth_values(x: np.ndarray, config: SmootherConfig) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    W, d = config.window, config.degree
    out = np.empty_like(x)
    head = min(W - 1, len(x))
    for t in range(head):
        k = t + 1
        out[t] = endpoint_weights(k, min(d, k - 1)) @ x[:k]
    if len(x) >= W:
        out[W - 1:] = sliding_dot(x, endpoint_weights(W, d))
    return out


def causal_smooth(series: TimeSeries, config: SmootherConfig = SmootherConfig()) -> TimeSeries:
    """Filtered series; the value at ``t`` depends on samples at times ``<= t`` only.

    Each output is the right-endpoint value of the degree-``d`` least-squares
    polynomial through the last ``W`` samples.  The first ``W - 1`` outputs
    fit the available prefix with the degree capped at ``prefix length - 1``.
    """
    if len(series) == 0:
        raise DomainError("cannot smooth an empty series")
    return series.with_values(smooth_values(series.values, config))


def regression_system(x: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``(x(t+n-1), ..., x(t))`` and targets ``x(t+n)``."""
    x = np.asarray(x, dtype=float)
    lagged = sliding_window_view(x, order + 1)
    return lagged[:, order - 1::-1], lagged[:, order]


def solve_truncated(A: np.ndarray, b: np.ndarray, rank_tolerance: float):
    """Minimum-norm least squares with relative singular-value truncation.

    Returns ``(solution, singular_values, rank)``.
    """
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise DegenerateInputError("regressor is identically zero")
    keep = s > rank_tolerance * s[0]
    rank = int(keep.sum())
    coef = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    return coef, s, rank


def identify_values(x: np.ndarray, config: IdentificationConfig,
                    window_origin: int = 0) -> DifferenceEquationModel:
    n = config.order
    if len(x) < 2 * n:
        raise ConfigurationError(f"segment of length {len(x)} is shorter than 2n={2 * n}")
    A, b = regression_system(x, n)
    coef, s, rank = solve_truncated(A, b, config.rank_tolerance)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    return DifferenceEquationModel(
        order=n,
        coefficients=tuple(coef),
        condition_number=max(cond, 1.0),
        window_origin=window_origin,
        rank=rank,
    )


def identify_window(segment: TimeSeries, config: IdentificationConfig) -> DifferenceEquationModel:
    """Fit ``x(t+n) = a_1 x(t+n-1) + ... + a_n x(t)`` over one window.

    The ``(L-n) x n`` system is solved through the SVD.  Singular values
    below ``rank_tolerance * s_max`` are dropped and the minimum-norm
    solution is returned, so locally constant stretches still yield a model
    (flagged by ``rank < order`` and a huge ``condition_number``).
    """
    if len(segment) != config.window:
        raise ConfigurationError(
            f"segment has {len(segment)} samples, configuration expects L={config.window}"
        )
    return identify_values(segment.values, config, segment.start_index)


def rolling_identify(series: TimeSeries, config: IdentificationConfig,
                     smoother: SmootherConfig = SmootherConfig()) -> list[DifferenceEquationModel]:
    """Identify on every full L-window of the smoothed series, ordered by origin."""
    if len(series) < max(smoother.window, config.window):
        raise DomainError(
            f"series of length {len(series)} needs at least "
            f"max(W={smoother.window}, L={config.window}) samples"
        )
    smoothed = smooth_values(series.values, smoother)
    L = config.window
    return [
        identify_values(smoothed[i:i + L], config, series.start_index + i)
        for i in range(len(smoothed) - L + 1)
    ]
