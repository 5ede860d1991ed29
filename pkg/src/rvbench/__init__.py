"""rvbench: realized-volatility forecasting models and a rolling backtest.

Builds RV series from price data, fits three econometric models (GARCH(1,1),
realized GARCH, HAR) and three from-scratch recurrent networks (RNN, LSTM,
GRU), and compares them out-of-sample under a rolling window across horizons
with a five-loss battery.
"""

__version__ = "0.1.0"

from .backtest import (
    DEFAULT_HORIZONS,
    ForecastSet,
    LossCell,
    LossTable,
    PointLosses,
    RollingSpec,
    horizon_sweep,
    loss_cell,
    point_losses,
    qlike,
    rolling_forecast,
)
from .diagnostics import SummaryStats, TestResult, adf, arch_lm, jarque_bera, ljung_box, summarize
from .garch import GarchForecaster, GarchParams, garch_fit, garch_forecast, garch_simulate
from .har import HarForecaster, HarParams, har_features, har_fit, har_forecast, har_simulate
from .nn import RangeScaler, RecurrentForecaster, TrainConfig, WindowedDataset, make_windows
from .optimize import FitDiagnostics, OptimizeDiagnostics, optimize
from .realized_garch import (
    RealizedGarchForecaster,
    RealizedGarchParams,
    RealizedGarchState,
    rgarch_fit,
    rgarch_forecast,
    rgarch_simulate,
)
from .series import (
    PriceSeries,
    ReturnSeries,
    RvSeries,
    SplitSpec,
    log_returns,
    read_price_csv,
    rv_aggregate,
    rv_from_squared_returns,
    split,
    write_rv_csv,
)

__all__ = [
    "DEFAULT_HORIZONS",
    "FitDiagnostics",
    "ForecastSet",
    "GarchForecaster",
    "GarchParams",
    "HarForecaster",
    "HarParams",
    "LossCell",
    "LossTable",
    "OptimizeDiagnostics",
    "PointLosses",
    "PriceSeries",
    "RangeScaler",
    "RealizedGarchForecaster",
    "RealizedGarchParams",
    "RealizedGarchState",
    "RecurrentForecaster",
    "ReturnSeries",
    "RollingSpec",
    "RvSeries",
    "SplitSpec",
    "SummaryStats",
    "TestResult",
    "TrainConfig",
    "WindowedDataset",
    "adf",
    "arch_lm",
    "garch_fit",
    "garch_forecast",
    "garch_simulate",
    "har_features",
    "har_fit",
    "har_forecast",
    "har_simulate",
    "horizon_sweep",
    "jarque_bera",
    "ljung_box",
    "log_returns",
    "loss_cell",
    "make_windows",
    "optimize",
    "point_losses",
    "qlike",
    "read_price_csv",
    "rgarch_fit",
    "rgarch_forecast",
    "rgarch_simulate",
    "rolling_forecast",
    "rv_aggregate",
    "rv_from_squared_returns",
    "split",
    "summarize",
    "write_rv_csv",
]
