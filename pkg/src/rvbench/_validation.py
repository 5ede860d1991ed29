"""Input validation helpers shared across estimators and free functions."""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str = "x", *, min_len: int = 0) -> np.ndarray:
    """Coerce ``x`` to a contiguous 1-d float64 array and validate it.

    Accepts plain sequences, numpy arrays, or any object exposing a
    ``values`` attribute holding a 1-d array (the series types do).
    """
    if hasattr(x, "values") and not isinstance(x, np.ndarray):
        x = x.values
    arr = np.ascontiguousarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} needs at least {min_len} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"{name} contains a non-finite value at index {bad}")
    return arr


def check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )
