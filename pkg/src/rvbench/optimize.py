"""Derivative-free minimization for likelihood fitting.

A deterministic Nelder-Mead simplex search run in an unconstrained space:
positive parameters are optimized through a log transform and unit-interval
parameters through a logit transform, so the simplex can never step outside
the admissible region and the returned point satisfies the constraints by
construction.  No randomness is involved anywhere; identical inputs give
bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

# standard simplex coefficients: reflection, expansion, contraction, shrink
_ALPHA, _GAMMA, _RHO, _SIGMA = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class OptimizeDiagnostics:
    fun: float
    n_evaluations: int
    iterations: int
    converged: bool


@dataclass(frozen=True)
class FitDiagnostics:
    """Outcome of a model fit; exactly one of log_likelihood / sse is set."""

    iterations: int
    converged: bool
    log_likelihood: float | None = None
    sse: float | None = None


def _to_unconstrained(x: np.ndarray, bounds) -> np.ndarray:
    z = np.array(x, dtype=float)
    for i, b in enumerate(bounds):
        if b == "positive":
            z[i] = np.log(x[i])
        elif b == "unit":
            z[i] = logit(x[i])
        elif b is not None:
            raise ValueError(f"unknown bound kind {b!r}")
    return z


def _to_constrained(z: np.ndarray, bounds) -> np.ndarray:
    x = np.array(z, dtype=float)
    for i, b in enumerate(bounds):
        if b == "positive":
            x[i] = np.exp(z[i])
        elif b == "unit":
            x[i] = expit(z[i])
    return x


def optimize(
    objective,
    initial,
    bounds=None,
    *,
    diameter_tol: float = 1e-10,
    max_evals: int = 10_000,
    initial_step: float = 0.25,
) -> tuple[np.ndarray, OptimizeDiagnostics]:
    """Minimize ``objective`` from ``initial`` subject to per-parameter domains.

    Parameters
    ----------
    objective : callable
        Maps a parameter vector (original space) to a scalar.  Values that
        come back non-finite are treated as worse than every finite value.
    initial : array-like
        Starting point, in the original space; the objective must be finite
        here.
    bounds : sequence of {None, "positive", "unit"}, optional
        Per-parameter domain; None leaves the coordinate unconstrained.
    diameter_tol : float
        Terminate once the simplex diameter (max-norm spread around the best
        vertex, in the transformed space) falls below this.
    max_evals : int
        Hard cap on objective evaluations.
    initial_step : float
        Edge length of the initial simplex in the transformed space.

    Returns
    -------
    (x, diagnostics)
        Best point found (original space, constraints satisfied) and search
        diagnostics; ``converged`` reflects the diameter criterion.
    """
    x0 = np.asarray(initial, dtype=float)
    ndim = x0.size
    if bounds is None:
        bounds = [None] * ndim
    if len(bounds) != ndim:
        raise ValueError(f"bounds has {len(bounds)} entries for {ndim} parameters")

    n_evals = 0

    def f(z: np.ndarray) -> float:
        nonlocal n_evals
        n_evals += 1
        value = objective(_to_constrained(z, bounds))
        return float(value) if np.isfinite(value) else np.inf

    z0 = _to_unconstrained(x0, bounds)
    f0 = f(z0)
    if not np.isfinite(f0):
        raise ValueError("objective is not finite at the initial point")

    simplex = np.tile(z0, (ndim + 1, 1))
    values = np.empty(ndim + 1)
    values[0] = f0
    for i in range(ndim):
        simplex[i + 1, i] += initial_step
        values[i + 1] = f(simplex[i + 1])

    iterations = 0
    converged = False
    while n_evals < max_evals:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if diameter < diameter_tol:
            converged = True
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        reflected = centroid + _ALPHA * (centroid - worst)
        f_reflected = f(reflected)
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[0]:
            expanded = centroid + _GAMMA * (reflected - centroid)
            f_expanded = f(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[-1]:  # outside contraction
            contracted = centroid + _RHO * (reflected - centroid)
            f_contracted = f(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        else:  # inside contraction
            contracted = centroid - _RHO * (centroid - worst)
            f_contracted = f(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
                continue

        # shrink toward the best vertex
        for i in range(1, ndim + 1):
            simplex[i] = simplex[0] + _SIGMA * (simplex[i] - simplex[0])
            values[i] = f(simplex[i])

    order = np.argsort(values, kind="stable")
    simplex, values = simplex[order], values[order]
    best = _to_constrained(simplex[0], bounds)
    return best, OptimizeDiagnostics(
        fun=float(values[0]),
        n_evaluations=n_evals,
        iterations=iterations,
        converged=converged,
    )
