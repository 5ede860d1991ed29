"""HAR regression: RV on lagged daily, weekly, and monthly components.

    RV[t] = b0 + b1 * RV[t-1] + b2 * mean(RV[t-5..t-1]) + b3 * mean(RV[t-22..t-1])

The 5/22 window lengths are the standard trading-week / trading-month
conventions.  Estimation is plain OLS; multi-step forecasts are iterated,
feeding each one-step forecast back into the history, with negative
predictions floored at zero (and counted).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ._rng import make_rng
from ._validation import as_float_array, check_fitted
from .ols import ols
from .optimize import FitDiagnostics
from .series import RvSeries

MIN_USABLE_ROWS = 30


@dataclass(frozen=True)
class HarParams:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    weekly_window: int = 5
    monthly_window: int = 22

    def __post_init__(self):
        if self.weekly_window < 1 or self.monthly_window < 1:
            raise ValueError("window lengths must be >= 1")
        if self.weekly_window > self.monthly_window:
            raise ValueError("weekly_window must not exceed monthly_window")

    @property
    def coef(self) -> np.ndarray:
        return np.array([self.beta0, self.beta1, self.beta2, self.beta3])


def har_features(values, t: int, weekly_window: int = 5,
                 monthly_window: int = 22) -> tuple[float, float, float]:
    """Daily / weekly / monthly components available just before index ``t``.

    ``t`` may equal ``len(values)`` to build the features for the next,
    not-yet-observed observation.
    """
    v = as_float_array(values, "values")
    if t < monthly_window:
        raise ValueError(f"need at least monthly_window={monthly_window} observations "
                         f"before index {t}")
    if t > len(v):
        raise ValueError(f"index {t} beyond series of length {len(v)}")
    daily = float(v[t - 1])
    weekly = float(np.mean(v[t - weekly_window : t]))
    monthly = float(np.mean(v[t - monthly_window : t]))
    return daily, weekly, monthly


def har_design(values: np.ndarray, weekly_window: int,
               monthly_window: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked regression design (X, y) for all usable rows."""
    v = values
    n = len(v)
    m = monthly_window
    c = np.concatenate(([0.0], np.cumsum(v)))
    t = np.arange(m, n)
    daily = v[t - 1]
    weekly = (c[t] - c[t - weekly_window]) / weekly_window
    monthly = (c[t] - c[t - monthly_window]) / monthly_window
    X = np.column_stack([np.ones(len(t)), daily, weekly, monthly])
    return X, v[t]


def har_fit(rv, weekly_window: int = 5,
            monthly_window: int = 22) -> tuple[HarParams, FitDiagnostics]:
    """OLS fit; raises on rank deficiency (e.g., a constant RV series)."""
    v = as_float_array(rv, "rv")
    usable = len(v) - monthly_window
    if usable < MIN_USABLE_ROWS:
        raise ValueError(
            f"need at least {MIN_USABLE_ROWS} usable rows after lag trimming, got {usable}"
        )
    X, y = har_design(v, weekly_window, monthly_window)
    fit = ols(X, y)
    params = HarParams(
        beta0=float(fit.coef[0]), beta1=float(fit.coef[1]),
        beta2=float(fit.coef[2]), beta3=float(fit.coef[3]),
        weekly_window=weekly_window, monthly_window=monthly_window,
    )
    return params, FitDiagnostics(iterations=1, converged=True, sse=fit.sse)


def har_forecast(params: HarParams, history, horizon: int) -> tuple[np.ndarray, int]:
    """Iterated multi-step forecast; returns (values, negatives floored)."""
    v = as_float_array(history, "history", min_len=params.monthly_window)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    buf = np.concatenate([v[-params.monthly_window:], np.empty(horizon)])
    m = params.monthly_window
    floored = 0
    for k in range(horizon):
        t = m + k
        daily = buf[t - 1]
        weekly = np.mean(buf[t - params.weekly_window : t])
        monthly = np.mean(buf[t - m : t])
        f = params.beta0 + params.beta1 * daily + params.beta2 * weekly + params.beta3 * monthly
        if f < 0.0:
            f = 0.0
            floored += 1
        buf[t] = f
    return buf[m:], floored


def har_simulate(
    params: HarParams,
    n: int,
    *,
    noise_sd: float = 0.0,
    seed=0,
    init: np.ndarray | None = None,
    start: str = "2000-01-03",
) -> RvSeries:
    """Generate an RV path from the recursion plus additive Gaussian noise.

    With no explicit ``init`` the history starts from seeded positive values
    spread around the stationary mean, which keeps the noise-free design
    matrix full-rank.  Negative draws are floored at zero.
    """
    rng = make_rng(seed)
    m = params.monthly_window
    persistence = params.beta1 + params.beta2 + params.beta3
    if init is None:
        if persistence >= 1:
            raise ValueError("persistence >= 1: supply an explicit init history")
        level = params.beta0 / (1.0 - persistence)
        init = level * rng.uniform(0.2, 1.8, size=m)
    init = as_float_array(init, "init", min_len=m)
    noise = rng.normal(0.0, noise_sd, size=n) if noise_sd > 0 else np.zeros(n)
    buf = np.concatenate([init[-m:], np.empty(n)])
    for k in range(n):
        t = m + k
        daily = buf[t - 1]
        weekly = np.mean(buf[t - params.weekly_window : t])
        monthly = np.mean(buf[t - m : t])
        value = (params.beta0 + params.beta1 * daily + params.beta2 * weekly
                 + params.beta3 * monthly + noise[k])
        buf[t] = max(value, 0.0)
    timestamps = np.datetime64(start, "s") + np.arange(n) * np.timedelta64(86_400, "s")
    return RvSeries(timestamps=timestamps, values=buf[m:], frequency="daily",
                    samples_per_bucket=1)


class HarForecaster(BaseEstimator, RegressorMixin):
    """HAR regression with a fit/predict/forecast estimator surface."""

    def __init__(self, weekly_window: int = 5, monthly_window: int = 22):
        self.weekly_window = weekly_window
        self.monthly_window = monthly_window

    def fit(self, rv, y=None):
        self.params_, self.diagnostics_ = har_fit(
            rv, weekly_window=self.weekly_window, monthly_window=self.monthly_window
        )
        return self

    def predict(self, X) -> np.ndarray:
        """Linear prediction from a (daily, weekly, monthly) feature matrix."""
        check_fitted(self, "params_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) feature matrix, got {X.shape}")
        p = self.params_
        return p.beta0 + X @ np.array([p.beta1, p.beta2, p.beta3])

    def forecast(self, history, horizon: int) -> np.ndarray:
        check_fitted(self, "params_")
        values, self.last_floored_count_ = har_forecast(self.params_, history, horizon)
        return values

    def to_json_dict(self) -> dict:
        check_fitted(self, "params_")
        p = self.params_
        return {
            "model": "har",
            "params": {"beta0": p.beta0, "beta1": p.beta1, "beta2": p.beta2,
                       "beta3": p.beta3, "weekly_window": p.weekly_window,
                       "monthly_window": p.monthly_window},
            "loglik": None,
            "converged": self.diagnostics_.converged,
        }
