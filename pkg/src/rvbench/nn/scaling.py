"""Min-max scaling fitted on training data only."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import as_float_array, check_fitted


class RangeScaler(BaseEstimator, TransformerMixin):
    """Map the observed training range onto [0, 1].

    transform(x) = (x - min) / (max - min); values outside the fitted range
    map outside [0, 1] (no clipping), and inverse_transform is exact.
    """

    def fit(self, X, y=None):
        x = as_float_array(X, "X", min_len=2)
        lo, hi = float(x.min()), float(x.max())
        if not hi > lo:
            raise ValueError("training series is constant; scaling range undefined")
        self.observed_min_ = lo
        self.observed_max_ = hi
        return self

    def transform(self, X) -> np.ndarray:
        check_fitted(self, "observed_min_")
        x = np.asarray(X, dtype=float)
        return (x - self.observed_min_) / (self.observed_max_ - self.observed_min_)

    def inverse_transform(self, X) -> np.ndarray:
        check_fitted(self, "observed_min_")
        x = np.asarray(X, dtype=float)
        return self.observed_min_ + x * (self.observed_max_ - self.observed_min_)
