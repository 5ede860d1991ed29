"""GARCH(1,1) estimation, forecasting, and simulation.

The conditional-variance recursion

    sigma2[t] = omega + alpha * u[t-1]**2 + beta * sigma2[t-1]

is fitted by Gaussian maximum likelihood on zero-mean innovations, with the
stationarity constraint alpha + beta < 1 enforced through the optimizer's
parameter transform (persistence and its split are optimized on the logit
scale, omega on the log scale).  Forecasts beyond one step follow the
conditional-expectation recursion, converging geometrically to the long-run
variance omega / (1 - alpha - beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter
from sklearn.base import BaseEstimator

from ._rng import make_rng
from ._validation import as_float_array, check_fitted
from .optimize import FitDiagnostics, optimize
from .series import ReturnSeries

VARIANCE_FLOOR = 1e-12  # guards the log-likelihood against degenerate variances
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if not self.alpha + self.beta < 1:
            raise ValueError(
                f"alpha + beta must be below 1, got {self.alpha + self.beta}"
            )

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def long_run_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


def garch_filter(u2: np.ndarray, omega: float, alpha: float, beta: float,
                 init_sigma2: float) -> np.ndarray:
    """Conditional variances under the recursion, sigma2[0] = init_sigma2."""
    n = len(u2)
    sigma2 = np.empty(n)
    sigma2[0] = init_sigma2
    if n > 1:
        drive = omega + alpha * u2[:-1]
        sigma2[1:], _ = lfilter([1.0], [1.0, -beta], drive, zi=[beta * init_sigma2])
    return sigma2


def garch_loglik(u2: np.ndarray, omega: float, alpha: float, beta: float,
                 init_sigma2: float | None = None) -> float:
    """Gaussian log-likelihood of squared innovations ``u2``."""
    if init_sigma2 is None:
        init_sigma2 = float(np.mean(u2))
    sigma2 = garch_filter(u2, omega, alpha, beta, init_sigma2)
    sigma2 = np.maximum(sigma2, VARIANCE_FLOOR)
    return float(-0.5 * np.sum(_LOG_2PI + np.log(sigma2) + u2 / sigma2))


def garch_fit(
    returns,
    *,
    max_evals: int = 10_000,
    diameter_tol: float = 1e-10,
    initial: GarchParams | None = None,
    initial_step: float = 0.25,
) -> tuple[GarchParams, FitDiagnostics]:
    """Maximum-likelihood GARCH(1,1) fit on zero-mean returns.

    The first conditional variance is initialized to the mean squared
    return (the sample variance under the zero-mean convention).  The fit
    is deterministic: identical inputs and options give bitwise-identical
    parameters.  On hitting the evaluation budget the best point found is
    still returned, flagged as unconverged.
    """
    r = as_float_array(returns, "returns", min_len=100)
    if np.var(r) == 0.0:
        raise ValueError("returns have zero sample variance")
    u2 = r**2
    v = float(np.mean(u2))

    def objective(x: np.ndarray) -> float:
        omega, persistence, share = x
        alpha = persistence * share
        beta = persistence * (1.0 - share)
        return -garch_loglik(u2, omega, alpha, beta, v)

    if initial is None:
        x0 = (0.05 * v, 0.95, 0.05 / 0.95)
    else:
        # keep the warm start strictly interior for the logit transform
        p0 = min(max(initial.persistence, 1e-8), 1.0 - 1e-8)
        s0 = min(max(initial.alpha / p0, 1e-8), 1.0 - 1e-8)
        x0 = (initial.omega, p0, s0)
    best, diag = optimize(
        objective,
        x0,
        bounds=("positive", "unit", "unit"),
        diameter_tol=diameter_tol,
        max_evals=max_evals,
        initial_step=initial_step,
    )
    omega, persistence, share = best
    params = GarchParams(omega=float(omega), alpha=float(persistence * share),
                         beta=float(persistence * (1.0 - share)))
    return params, FitDiagnostics(
        iterations=diag.n_evaluations, converged=diag.converged,
        log_likelihood=-diag.fun,
    )


def garch_forecast(params: GarchParams, last_u2: float, last_sigma2: float,
                   horizon: int) -> np.ndarray:
    """Multi-step variance forecast.

    Step 1 applies the recursion to the observed state; step k >= 2 uses the
    conditional expectation, V_L + (alpha+beta)^(k-1) (step1 - V_L), which
    converges monotonically to the long-run variance.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if last_u2 < 0 or last_sigma2 < 0:
        raise ValueError("state variances must be non-negative")
    step1 = params.omega + params.alpha * last_u2 + params.beta * last_sigma2
    v_long = params.long_run_variance
    k = np.arange(horizon)
    return v_long + params.persistence**k * (step1 - v_long)


def garch_simulate(params: GarchParams, n: int, seed,
                   start: str = "2000-01-03") -> ReturnSeries:
    """Simulate returns u_t = sigma_t z_t with standard-normal z_t.

    The recursion starts at the long-run variance; output carries synthetic
    consecutive daily timestamps.  Reproducible per seed.
    """
    rng = make_rng(seed)
    z = rng.standard_normal(n)
    u = np.empty(n)
    sigma2 = params.long_run_variance
    omega, alpha, beta = params.omega, params.alpha, params.beta
    for t in range(n):
        u[t] = math.sqrt(sigma2) * z[t]
        sigma2 = omega + alpha * u[t] * u[t] + beta * sigma2
    timestamps = np.datetime64(start, "s") + np.arange(n) * np.timedelta64(86_400, "s")
    return ReturnSeries(timestamps=timestamps, returns=u, frequency="daily")


class GarchForecaster(BaseEstimator):
    """GARCH(1,1) with a fit/forecast estimator surface.

    Parameters
    ----------
    max_evals : int
        Evaluation budget for the likelihood search.
    diameter_tol : float
        Simplex convergence tolerance.
    """

    def __init__(self, max_evals: int = 10_000, diameter_tol: float = 1e-10):
        self.max_evals = max_evals
        self.diameter_tol = diameter_tol

    def fit(self, returns, *, initial: GarchParams | None = None,
            initial_step: float = 0.25):
        r = as_float_array(returns, "returns")
        self.params_, self.diagnostics_ = garch_fit(
            r, max_evals=self.max_evals, diameter_tol=self.diameter_tol,
            initial=initial, initial_step=initial_step,
        )
        self._set_state(r)
        return self

    def _set_state(self, r: np.ndarray) -> None:
        u2 = r**2
        p = self.params_
        sigma2 = garch_filter(u2, p.omega, p.alpha, p.beta, float(np.mean(u2)))
        self.last_u2_ = float(u2[-1])
        self.last_sigma2_ = float(sigma2[-1])

    def update_state(self, returns) -> None:
        """Re-filter the state through fresh history under the fitted params."""
        check_fitted(self, "params_")
        self._set_state(as_float_array(returns, "returns", min_len=1))

    def forecast(self, horizon: int) -> np.ndarray:
        check_fitted(self, "params_")
        return garch_forecast(self.params_, self.last_u2_, self.last_sigma2_, horizon)

    def to_json_dict(self) -> dict:
        check_fitted(self, "params_")
        return {
            "model": "garch",
            "params": {"omega": self.params_.omega, "alpha": self.params_.alpha,
                       "beta": self.params_.beta},
            "loglik": self.diagnostics_.log_likelihood,
            "converged": self.diagnostics_.converged,
        }
