"""Realized GARCH: joint model of returns and an observed RV measure.

The latent conditional variance follows

    h[t] = omega + alpha * r[t-1]**2 + beta * h[t-1] + gamma * x[t-1]

with returns r_t = sqrt(h_t) z_t and the measurement equation linking the
observed RV to the latent variance,

    x[t] = xi + phi * h[t] + u_t,      u_t ~ N(0, sigma_u^2).

Both z_t and the measurement error are taken as Gaussian, so the joint
log-likelihood is the sum of the return and measurement contributions.
Multi-step forecasts close the recursion with r^2 -> h and x -> xi + phi h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter
from sklearn.base import BaseEstimator

from ._rng import make_rng
from ._validation import as_float_array, check_fitted
from .garch import VARIANCE_FLOOR, _LOG_2PI
from .optimize import FitDiagnostics, optimize

_PERSISTENCE_CAP = 1.0 - 1e-9


@dataclass(frozen=True)
class RealizedGarchParams:
    omega: float
    alpha: float
    beta: float
    gamma: float
    xi: float
    phi: float
    sigma_u: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if not self.sigma_u > 0:
            raise ValueError(f"sigma_u must be positive, got {self.sigma_u}")
        if not self.beta + self.gamma * self.phi < 1:
            raise ValueError(
                "beta + gamma*phi must be below 1, got "
                f"{self.beta + self.gamma * self.phi}"
            )

    @property
    def closed_persistence(self) -> float:
        """Persistence of the forecast recursion after closing x = xi + phi h."""
        return self.alpha + self.beta + self.gamma * self.phi


@dataclass(frozen=True)
class RealizedGarchState:
    """Observed state at the forecast origin."""

    last_r2: float
    last_x: float
    last_h: float


def rgarch_filter(r2: np.ndarray, x: np.ndarray, params: RealizedGarchParams,
                  init_h: float) -> np.ndarray:
    """Latent variance path h under the recursion, h[0] = init_h."""
    n = len(r2)
    h = np.empty(n)
    h[0] = init_h
    if n > 1:
        drive = params.omega + params.alpha * r2[:-1] + params.gamma * x[:-1]
        h[1:], _ = lfilter([1.0], [1.0, -params.beta], drive, zi=[params.beta * init_h])
    return h


def rgarch_loglik(r2: np.ndarray, x: np.ndarray, params: RealizedGarchParams,
                  init_h: float | None = None) -> float:
    """Joint Gaussian log-likelihood of (returns, RV measurements)."""
    if init_h is None:
        init_h = float(np.mean(x))
    h = rgarch_filter(r2, x, params, init_h)
    hf = np.maximum(h, VARIANCE_FLOOR)
    ll_return = -0.5 * np.sum(_LOG_2PI + np.log(hf) + r2 / hf)
    resid = x - params.xi - params.phi * h
    s2 = params.sigma_u**2
    ll_measure = -0.5 * np.sum(_LOG_2PI + math.log(s2) + resid**2 / s2)
    return float(ll_return + ll_measure)


def _aligned_arrays(returns, rv) -> tuple[np.ndarray, np.ndarray]:
    r = as_float_array(returns, "returns")
    x = as_float_array(rv, "rv")
    if len(r) != len(x):
        raise ValueError(f"misaligned series: {len(r)} returns vs {len(x)} rv values")
    ts_r = getattr(returns, "timestamps", None)
    ts_x = getattr(rv, "timestamps", None)
    if ts_r is not None and ts_x is not None and not np.array_equal(ts_r, ts_x):
        raise ValueError("misaligned series: timestamps differ")
    return r, x


def rgarch_fit(
    returns,
    rv,
    *,
    max_evals: int = 10_000,
    diameter_tol: float = 1e-10,
    initial: RealizedGarchParams | None = None,
    initial_step: float = 0.25,
) -> tuple[RealizedGarchParams, FitDiagnostics]:
    """Joint maximum-likelihood fit; h[0] is initialized to the mean RV.

    omega, alpha, and sigma_u are searched on the log scale and beta on the
    logit scale; parameter vectors violating beta + gamma*phi < 1 are
    rejected inside the objective, so the returned parameters satisfy the
    persistence bound.  Deterministic given identical inputs and options.
    """
    r, x = _aligned_arrays(returns, rv)
    if len(r) < 200:
        raise ValueError(f"need at least 200 aligned observations, got {len(r)}")
    if not np.any(x > 0):
        raise ValueError("rv is identically zero")
    r2 = r**2
    mean_x = float(np.mean(x))

    def objective(vec: np.ndarray) -> float:
        omega, alpha, beta, gamma, xi, phi, sigma_u = vec
        if beta + gamma * phi >= _PERSISTENCE_CAP:
            return np.inf
        params = RealizedGarchParams(omega=omega, alpha=alpha, beta=beta,
                                     gamma=gamma, xi=xi, phi=phi, sigma_u=sigma_u)
        with np.errstate(over="ignore", invalid="ignore"):
            ll = rgarch_loglik(r2, x, params, mean_x)
        return -ll if np.isfinite(ll) else np.inf

    if initial is None:
        sd_x = float(np.std(x))
        if sd_x == 0.0:
            raise ValueError("rv is constant; measurement scale undefined")
        x0 = (0.15 * mean_x, 0.05, 0.50, 0.30, 0.0, 1.0, sd_x)
    else:
        x0 = (initial.omega, max(initial.alpha, 1e-12), min(max(initial.beta, 1e-8), 1 - 1e-8),
              initial.gamma, initial.xi, initial.phi, initial.sigma_u)
    best, diag = optimize(
        objective,
        x0,
        bounds=("positive", "positive", "unit", None, None, None, "positive"),
        diameter_tol=diameter_tol,
        max_evals=max_evals,
        initial_step=initial_step,
    )
    params = RealizedGarchParams(
        omega=float(best[0]), alpha=float(best[1]), beta=float(best[2]),
        gamma=float(best[3]), xi=float(best[4]), phi=float(best[5]),
        sigma_u=float(best[6]),
    )
    return params, FitDiagnostics(
        iterations=diag.n_evaluations, converged=diag.converged,
        log_likelihood=-diag.fun,
    )


def rgarch_forecast(params: RealizedGarchParams, state: RealizedGarchState,
                    horizon: int) -> np.ndarray:
    """Multi-step variance forecast.

    Step 1 applies the recursion to the observed state; steps k >= 2 replace
    the unobserved r^2 by h and x by its conditional mean xi + phi h, giving

        h[k] = omega + gamma*xi + (alpha + beta + gamma*phi) * h[k-1].
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    out = np.empty(horizon)
    out[0] = (params.omega + params.alpha * state.last_r2
              + params.beta * state.last_h + params.gamma * state.last_x)
    intercept = params.omega + params.gamma * params.xi
    rho = params.closed_persistence
    for k in range(1, horizon):
        out[k] = intercept + rho * out[k - 1]
    return out


def rgarch_simulate(params: RealizedGarchParams, n: int, seed,
                    init_h: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Simulate (returns, rv) arrays from the joint model.

    The measurement noise is Gaussian, so simulated x_t can dip below zero
    when sigma_u is large relative to the variance level; the latent h is
    floored at a tiny positive value to keep sqrt(h) defined during
    optimizer-grade stress parameters.  Reproducible per seed.
    """
    rng = make_rng(seed)
    z = rng.standard_normal(n)
    eps = rng.standard_normal(n)
    r = np.empty(n)
    x = np.empty(n)
    if init_h is None:
        rho = params.closed_persistence
        if rho >= 1:
            raise ValueError("cannot derive a stationary start: persistence >= 1")
        init_h = (params.omega + params.gamma * params.xi) / (1.0 - rho)
    h = max(init_h, VARIANCE_FLOOR)
    for t in range(n):
        r[t] = math.sqrt(h) * z[t]
        x[t] = params.xi + params.phi * h + params.sigma_u * eps[t]
        h = params.omega + params.alpha * r[t] ** 2 + params.beta * h + params.gamma * x[t]
        h = max(h, VARIANCE_FLOOR)
    return r, x


class RealizedGarchForecaster(BaseEstimator):
    """Realized GARCH with a fit/forecast estimator surface."""

    def __init__(self, max_evals: int = 10_000, diameter_tol: float = 1e-10):
        self.max_evals = max_evals
        self.diameter_tol = diameter_tol

    def fit(self, returns, rv, *, initial: RealizedGarchParams | None = None,
            initial_step: float = 0.25):
        r, x = _aligned_arrays(returns, rv)
        self.params_, self.diagnostics_ = rgarch_fit(
            r, x, max_evals=self.max_evals, diameter_tol=self.diameter_tol,
            initial=initial, initial_step=initial_step,
        )
        self._set_state(r, x)
        return self

    def _set_state(self, r: np.ndarray, x: np.ndarray) -> None:
        r2 = r**2
        h = rgarch_filter(r2, x, self.params_, float(np.mean(x)))
        self.state_ = RealizedGarchState(
            last_r2=float(r2[-1]), last_x=float(x[-1]), last_h=float(h[-1])
        )

    def update_state(self, returns, rv) -> None:
        """Re-filter the state through fresh history under the fitted params."""
        check_fitted(self, "params_")
        r, x = _aligned_arrays(returns, rv)
        self._set_state(r, x)

    def forecast(self, horizon: int) -> np.ndarray:
        check_fitted(self, "params_")
        return rgarch_forecast(self.params_, self.state_, horizon)

    def to_json_dict(self) -> dict:
        check_fitted(self, "params_")
        p = self.params_
        return {
            "model": "rgarch",
            "params": {"omega": p.omega, "alpha": p.alpha, "beta": p.beta,
                       "gamma": p.gamma, "xi": p.xi, "phi": p.phi,
                       "sigma_u": p.sigma_u},
            "loglik": self.diagnostics_.log_likelihood,
            "converged": self.diagnostics_.converged,
        }
