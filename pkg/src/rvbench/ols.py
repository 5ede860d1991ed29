"""Ordinary least squares via the normal equations, with a rank check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OlsResult:
    coef: np.ndarray
    std_errors: np.ndarray
    residuals: np.ndarray
    r_squared: float
    sse: float

    @property
    def t_values(self) -> np.ndarray:
        return self.coef / self.std_errors


def ols(X: np.ndarray, y: np.ndarray) -> OlsResult:
    """Solve min ||y - X b||^2; raises on a rank-deficient design."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise ValueError(f"need more rows ({n}) than regressors ({k})")
    if np.linalg.matrix_rank(X) < k:
        raise ValueError("rank-deficient regressor matrix")
    xtx = X.T @ X
    coef = np.linalg.solve(xtx, X.T @ y)
    resid = y - X @ coef
    sse = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    r_squared = 0.0 if tss == 0.0 else 1.0 - sse / tss
    sigma2 = sse / (n - k)
    std_errors = np.sqrt(np.diag(np.linalg.inv(xtx)) * sigma2)
    return OlsResult(coef=coef, std_errors=std_errors, residuals=resid,
                     r_squared=r_squared, sse=sse)
