"""Forecasting by repeated identification of low-order linear difference
equations on short sliding windows."""

__version__ = "0.1.0"

from .core import (
    AlignmentError,
    ConfigurationError,
    DegenerateInputError,
    DifferenceEquationModel,
    DiffcastError,
    DomainError,
    RangeError,
    ResidualDecomposition,
    TimeSeries,
    decompose,
    slice_series,
)
from .estimate import (
    IdentificationConfig,
    SmootherConfig,
    causal_smooth,
    identify_window,
    rolling_identify,
)
from .forecast import (
    ForecastConfig,
    ForecastRecord,
    Indicator,
    forecast_from_trendline,
    forecast_series,
    iterate_forecast,
    moving_average,
    moving_std,
    rolling_forecast,
)
from .backtest import BacktestConfig, BacktestReport, run_backtest, sweep_report
