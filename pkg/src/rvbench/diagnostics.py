"""Descriptive statistics and time-series diagnostics.

The battery mirrors the usual pre-modeling checks on return and RV series:
sample moments, Jarque-Bera normality, Ljung-Box serial correlation,
Engle's LM test for ARCH effects, and an augmented Dickey-Fuller unit-root
regression.  Conventions are pinned here once:

* skewness and kurtosis are bias-uncorrected moment ratios, kurtosis
  reported as *excess* (normal = 0);
* autocorrelations use the biased 1/n denominator, standard in the
  Ljung-Box literature;
* the ADF test reports the t-statistic against embedded constant critical
  values rather than a p-value surface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .ols import ols
from ._validation import as_float_array

ADF_CRITICAL_VALUES = {"1%": -3.43, "5%": -2.86, "10%": -2.57}

SUMMARY_COLUMNS = ("obs", "mean", "sd", "min", "max", "skew", "kurt")


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    minimum: float
    maximum: float
    skewness: float
    kurtosis: float  # excess


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float | None
    decision_note: str

    def __post_init__(self):
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")


def _central_moments(x: np.ndarray) -> tuple[np.ndarray, float, float, float]:
    d = x - x.mean()
    return d, float(np.mean(d**2)), float(np.mean(d**3)), float(np.mean(d**4))


def summarize(series) -> SummaryStats:
    """Sample moments in reporting order: n, mean, sd, min, max, skew, kurt.

    For a degenerate (constant) series the moment ratios are undefined;
    skewness and excess kurtosis are reported as 0 by convention.
    """
    x = as_float_array(series, "series", min_len=4)
    d, m2, m3, m4 = _central_moments(x)
    if m2 == 0.0:
        skew, kurt = 0.0, 0.0
    else:
        skew = m3 / m2**1.5
        kurt = m4 / m2**2 - 3.0
    return SummaryStats(
        n=len(x),
        mean=float(x.mean()),
        sd=float(x.std(ddof=1)),
        minimum=float(x.min()),
        maximum=float(x.max()),
        skewness=skew,
        kurtosis=kurt,
    )


def summary_csv_row(stats: SummaryStats) -> str:
    """One CSV row in the column order of :data:`SUMMARY_COLUMNS`."""
    cells = (stats.n, stats.mean, stats.sd, stats.minimum, stats.maximum,
             stats.skewness, stats.kurtosis)
    return ",".join(str(c) if isinstance(c, int) else f"{c:.17g}" for c in cells)


def jarque_bera(series) -> TestResult:
    """JB = n/6 (S^2 + K^2/4) with K the excess kurtosis; chi-square(2)."""
    x = as_float_array(series, "series", min_len=8)
    d, m2, m3, m4 = _central_moments(x)
    if m2 == 0.0:
        raise ValueError("zero-variance series: Jarque-Bera undefined")
    skew = m3 / m2**1.5
    kurt = m4 / m2**2 - 3.0
    stat = len(x) / 6.0 * (skew**2 + kurt**2 / 4.0)
    p = float(chi2.sf(stat, 2))
    note = "normality rejected at 5%" if p < 0.05 else "consistent with normality at 5%"
    return TestResult(statistic=float(stat), p_value=p, decision_note=note)


def autocorrelations(x: np.ndarray, lags: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..lags, biased 1/n denominator."""
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        raise ValueError("zero-variance series: autocorrelations undefined")
    return np.array([float(d[k:] @ d[:-k]) / denom for k in range(1, lags + 1)])


def ljung_box(series, lags: int = 20) -> TestResult:
    """Q = n(n+2) sum_k rho_k^2 / (n-k); chi-square(lags)."""
    x = as_float_array(series, "series")
    n = len(x)
    if n <= lags + 1:
        raise ValueError(f"need more than lags+1 = {lags + 1} observations, got {n}")
    rho = autocorrelations(x, lags)
    k = np.arange(1, lags + 1)
    stat = float(n * (n + 2) * np.sum(rho**2 / (n - k)))
    p = float(chi2.sf(stat, lags))
    note = "white noise rejected at 5%" if p < 0.05 else "no serial correlation detected at 5%"
    return TestResult(statistic=stat, p_value=p, decision_note=note)


def arch_lm(series, lags: int) -> TestResult:
    """Engle's LM test: (n - lags) R^2 from regressing the demeaned-squared
    series on its own lags; chi-square(lags)."""
    x = as_float_array(series, "series")
    n = len(x)
    if n <= 2 * lags + 1:
        raise ValueError(f"need more than 2*lags+1 = {2 * lags + 1} observations, got {n}")
    s = (x - x.mean()) ** 2
    y = s[lags:]
    X = np.column_stack(
        [np.ones(n - lags)] + [s[lags - k : n - k] for k in range(1, lags + 1)]
    )
    fit = ols(X, y)
    stat = (n - lags) * fit.r_squared
    p = float(chi2.sf(stat, lags))
    note = "ARCH effect detected at 5%" if p < 0.05 else "no ARCH effect detected at 5%"
    return TestResult(statistic=float(stat), p_value=p, decision_note=note)


def adf(series, max_lag: int) -> TestResult:
    """Augmented Dickey-Fuller regression with intercept and ``max_lag``
    difference lags; the statistic is the t-ratio on the lagged level.

    No p-value is reported; the decision note compares the statistic
    against the embedded constant critical values.
    """
    x = as_float_array(series, "series")
    n = len(x)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if n <= max_lag + 10:
        raise ValueError(f"need more than max_lag+10 = {max_lag + 10} observations, got {n}")
    dy = np.diff(x)
    m = len(dy) - max_lag  # usable rows
    y = dy[max_lag:]
    columns = [np.ones(m), x[max_lag : n - 1]]
    for k in range(1, max_lag + 1):
        columns.append(dy[max_lag - k : len(dy) - k])
    fit = ols(np.column_stack(columns), y)
    stat = float(fit.t_values[1])
    if stat < ADF_CRITICAL_VALUES["1%"]:
        note = "unit root rejected at 1%"
    elif stat < ADF_CRITICAL_VALUES["5%"]:
        note = "unit root rejected at 5%"
    elif stat < ADF_CRITICAL_VALUES["10%"]:
        note = "unit root rejected at 10%"
    else:
        note = "fail to reject unit root at 10%"
    return TestResult(statistic=stat, p_value=None, decision_note=note)
