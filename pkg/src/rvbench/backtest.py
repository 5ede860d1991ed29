"""Rolling-window out-of-sample forecasting and the loss battery.

For a series of n RV observations, a window of size w, and a horizon h, the
forecast origins are t = w .. n-h (0-based): the model sees exactly the w
observations at indices [t-w, t-1], forecasts h steps, and is scored against
the actual value at index t+h-1, giving n - w - h + 1 records per horizon.
No fit window ever contains or follows its target.

Econometric models refit at a configurable cadence (default every origin)
and are warm-started from the previous optimum, which is deterministic and
disclosed in run metadata; between refits the fitted parameters are kept
and only the filter state is advanced over the current window.  Neural
models train one network per (kind, horizon) cell with an ``output_days``
head matching the horizon and reading component h-1; their refit cadence
defaults to 20 origins.

Two QLIKE conventions are computed side by side:

    log form:        mean( log(pred) + actual/pred - 1 )
    canonical form:  mean( actual/pred - log(actual/pred) - 1 )

The canonical form is non-negative and zero exactly at perfect forecasts;
the log form keeps the likelihood level and can be negative for variances
below one.  Zero actuals are
excluded from the canonical form (and from MAPE) with disclosed counts, and
predictions are floored at 1e-12 for QLIKE only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import seed_sequence
from ._validation import as_float_array
from .garch import GarchForecaster
from .har import HarForecaster
from .nn.training import ARCHITECTURES, RecurrentForecaster
from .realized_garch import RealizedGarchForecaster

ECONOMETRIC_MODELS = ("garch", "rgarch", "har")
NEURAL_MODELS = ("rnn", "lstm", "gru")
VALID_MODELS = ("rnn", "lstm", "gru", "garch", "rgarch", "har")

DEFAULT_HORIZONS = (1, 2, 3, 4, 5, 6, 7, 14, 30, 60, 90)
QLIKE_FLOOR = 1e-12

LOSS_FAMILIES = ("mse", "rmse", "mape", "mae", "qlike_log", "qlike_canonical")


@dataclass(frozen=True)
class RollingSpec:
    window_size: int
    horizons: tuple[int, ...]
    refit_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "horizons", tuple(int(h) for h in self.horizons))
        if self.window_size < 30:
            raise ValueError(f"window_size must be >= 30, got {self.window_size}")
        if not self.horizons or any(h < 1 for h in self.horizons):
            raise ValueError("horizons must be nonempty with every entry >= 1")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")


@dataclass
class ForecastSet:
    """Aligned out-of-sample records for one (model, horizon) cell.

    ``origins[i]`` is the forecast origin t: the fit window covered indices
    [t - window_size, t - 1] and the record's target sits at index
    t + horizon - 1.  Predictions are non-negative; negatives produced by a
    model were floored at zero and counted in ``floored_predictions``.
    """

    model: str
    horizon: int
    window_size: int
    timestamps: np.ndarray
    origins: np.ndarray
    predicted: np.ndarray
    actual: np.ndarray
    floored_predictions: int = 0

    def __post_init__(self):
        n = len(self.predicted)
        if not (len(self.actual) == len(self.origins) == len(self.timestamps) == n):
            raise ValueError("record arrays must be aligned one-to-one")
        if np.any(self.predicted < 0):
            raise ValueError("predictions must be non-negative")

    def __len__(self) -> int:
        return len(self.predicted)


@dataclass(frozen=True)
class PointLosses:
    mse: float
    rmse: float
    mape: float
    mae: float
    mape_excluded: int = 0


@dataclass
class LossCell:
    model: str
    horizon: int
    n_records: int
    mse: float
    rmse: float
    mape: float
    mae: float
    qlike_log: float
    qlike_canonical: float
    mape_excluded: int
    qlike_excluded: int
    qlike_floored: int
    floored_predictions: int
    refit_every: int


@dataclass
class LossTable:
    models: tuple[str, ...]
    horizons: tuple[int, ...]
    cells: list[LossCell] = field(default_factory=list)

    def cell(self, model: str, horizon: int) -> LossCell:
        for c in self.cells:
            if c.model == model and c.horizon == horizon:
                return c
        raise KeyError(f"no cell for ({model}, {horizon})")

    def to_csv(self) -> str:
        """Loss-family major layout: one row per (loss, model), horizon columns."""
        lines = ["loss,model," + ",".join(str(h) for h in self.horizons)]
        for family in LOSS_FAMILIES:
            for model in self.models:
                values = (getattr(self.cell(model, h), family) for h in self.horizons)
                lines.append(
                    f"{family},{model}," + ",".join(f"{v:.17g}" for v in values)
                )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "models": list(self.models),
            "horizons": list(self.horizons),
            "cells": [vars(c).copy() for c in self.cells],
        }


# ---------------------------------------------------------------------------
# loss functions


def point_losses(forecasts: ForecastSet) -> PointLosses:
    """MSE, RMSE, MAPE, and MAE over the record set.

    MAPE excludes zero-actual records (count reported) and is undefined if
    nothing remains after exclusion.
    """
    if len(forecasts) == 0:
        raise ValueError("empty forecast set")
    err = forecasts.predicted - forecasts.actual
    mse = float(np.mean(err**2))
    mae = float(np.mean(np.abs(err)))
    include = forecasts.actual != 0.0
    excluded = int(np.sum(~include))
    if not np.any(include):
        raise ValueError("mape undefined: every record has a zero actual")
    mape = float(np.mean(np.abs(err[include]) / np.abs(forecasts.actual[include])))
    return PointLosses(mse=mse, rmse=math.sqrt(mse), mape=mape, mae=mae,
                       mape_excluded=excluded)


def qlike(forecasts: ForecastSet, form: str = "canonical") -> float:
    """QLIKE in the requested convention; predictions must be positive.

    The canonical form excludes zero-actual records; the log form keeps
    them (its actual/pred term is defined at zero).
    """
    if form not in ("log", "canonical"):
        raise ValueError(f"form must be 'log' or 'canonical', got {form!r}")
    if len(forecasts) == 0:
        raise ValueError("empty forecast set")
    pred = forecasts.predicted
    if np.any(pred <= 0):
        i = int(np.flatnonzero(pred <= 0)[0])
        raise ValueError(
            f"non-positive prediction {pred[i]} in record {i} "
            f"(target {forecasts.timestamps[i]})"
        )
    actual = forecasts.actual
    if form == "log":
        return float(np.mean(np.log(pred) + actual / pred - 1.0))
    include = actual > 0.0
    if not np.any(include):
        raise ValueError("canonical qlike undefined: every record has a zero actual")
    ratio = actual[include] / pred[include]
    return float(np.mean(ratio - np.log(ratio) - 1.0))


def loss_cell(forecasts: ForecastSet, refit_every: int) -> LossCell:
    """Full loss battery for one cell, with exclusion/floor disclosure."""
    pl = point_losses(forecasts)
    floored = int(np.sum(forecasts.predicted < QLIKE_FLOOR))
    qset = replace(forecasts, predicted=np.maximum(forecasts.predicted, QLIKE_FLOOR))
    excluded = int(np.sum(forecasts.actual <= 0.0))
    return LossCell(
        model=forecasts.model, horizon=forecasts.horizon, n_records=len(forecasts),
        mse=pl.mse, rmse=pl.rmse, mape=pl.mape, mae=pl.mae,
        qlike_log=qlike(qset, "log"), qlike_canonical=qlike(qset, "canonical"),
        mape_excluded=pl.mape_excluded, qlike_excluded=excluded,
        qlike_floored=floored, floored_predictions=forecasts.floored_predictions,
        refit_every=refit_every,
    )


# ---------------------------------------------------------------------------
# model cells: fit(window) + forecast_path(window, hmax)


class _GarchCell:
    def __init__(self, options: dict):
        self._est = GarchForecaster(max_evals=options.get("max_evals", 10_000))

    def fit(self, window: np.ndarray) -> None:
        # rv is the squared-innovation proxy, so |r| = sqrt(rv)
        warm = getattr(self._est, "params_", None)
        step = 0.05 if warm is not None else 0.25
        self._est.fit(np.sqrt(window), initial=warm, initial_step=step)

    def forecast_path(self, window: np.ndarray, hmax: int) -> np.ndarray:
        self._est.update_state(np.sqrt(window))
        return self._est.forecast(hmax)


class _RealizedGarchCell:
    def __init__(self, options: dict):
        self._est = RealizedGarchForecaster(max_evals=options.get("max_evals", 10_000))

    def fit(self, window: np.ndarray) -> None:
        warm = getattr(self._est, "params_", None)
        step = 0.05 if warm is not None else 0.25
        self._est.fit(np.sqrt(window), window, initial=warm, initial_step=step)

    def forecast_path(self, window: np.ndarray, hmax: int) -> np.ndarray:
        self._est.update_state(np.sqrt(window), window)
        return self._est.forecast(hmax)


class _HarCell:
    def __init__(self, options: dict):
        self._est = HarForecaster(
            weekly_window=options.get("weekly_window", 5),
            monthly_window=options.get("monthly_window", 22),
        )

    def fit(self, window: np.ndarray) -> None:
        self._est.fit(window)

    def forecast_path(self, window: np.ndarray, hmax: int) -> np.ndarray:
        return self._est.forecast(window, hmax)


class _NeuralCell:
    def __init__(self, kind: str, horizon: int, options: dict, seed_seq):
        allowed = {"hidden_units", "dense_units", "sequence_length", "learning_rate",
                   "epochs", "batch_size", "dropout_rate", "patience", "min_delta"}
        kwargs = {k: v for k, v in options.items() if k in allowed}
        self._est = RecurrentForecaster(kind=kind, output_days=horizon, **kwargs)
        self._stream = seed_seq
        self._n_refits = 0

    def fit(self, window: np.ndarray) -> None:
        refit_seed = seed_sequence(self._stream, spawn_key=(self._n_refits,))
        self._n_refits += 1
        self._est.fit(window, seed=refit_seed)

    def forecast_path(self, window: np.ndarray, hmax: int) -> np.ndarray:
        recent = window[-self._est.sequence_length:]
        return self._est.predict(recent)[:hmax]


def _build_cell(name: str, horizon: int, options: dict, seed_seq):
    if name == "garch":
        return _GarchCell(options)
    if name == "rgarch":
        return _RealizedGarchCell(options)
    if name == "har":
        return _HarCell(options)
    if name in NEURAL_MODELS:
        return _NeuralCell(name, horizon, options, seed_seq)
    raise ValueError(
        f"unknown model {name!r}; valid names are {{{', '.join(VALID_MODELS)}}}"
    )


def default_refit_every(name: str) -> int:
    """Per-origin refits for the cheap econometric fits, every 20 origins
    for the neural nets (per-step neural refits are computationally
    indefensible)."""
    return 20 if name in NEURAL_MODELS else 1


# ---------------------------------------------------------------------------
# the rolling harness


def _resolve_series(rv):
    values = as_float_array(rv, "rv")
    timestamps = getattr(rv, "timestamps", None)
    if timestamps is None:
        timestamps = np.arange(len(values)).astype("datetime64[s]")
    return values, timestamps


def _run_cell(cell, values, timestamps, model_name, spec, horizons):
    """March one cell over the origins, sharing each fit across horizons."""
    n = len(values)
    w = spec.window_size
    max_h = max(horizons)
    min_h = min(horizons)
    records = {h: ([], [], []) for h in horizons}  # origin, predicted, actual
    floored = {h: 0 for h in horizons}
    for t in range(w, n - min_h + 1):
        window = values[t - w : t]
        if (t - w) % spec.refit_every == 0:
            cell.fit(window)
        hmax = min(max_h, n - t)
        path = cell.forecast_path(window, hmax)
        for h in horizons:
            if t + h > n:
                continue
            pred = float(path[h - 1])
            if pred < 0.0:
                pred = 0.0
                floored[h] += 1
            origin_list, pred_list, actual_list = records[h]
            origin_list.append(t)
            pred_list.append(pred)
            actual_list.append(values[t + h - 1])
    out = {}
    for h in horizons:
        origin_list, pred_list, actual_list = records[h]
        origins = np.asarray(origin_list, dtype=int)
        out[h] = ForecastSet(
            model=model_name, horizon=h, window_size=w,
            timestamps=timestamps[origins + h - 1] if len(origins) else timestamps[:0],
            origins=origins,
            predicted=np.asarray(pred_list, dtype=float),
            actual=np.asarray(actual_list, dtype=float),
            floored_predictions=floored[h],
        )
    return out


def rolling_forecast(model, rv, spec: RollingSpec, *, options: dict | None = None,
                     seed=0) -> dict[int, "ForecastSet"]:
    """Out-of-sample forecasts for every horizon in ``spec``.

    ``model`` is a registered name (one of VALID_MODELS) or any object with
    ``fit(window)`` and ``forecast_path(window, hmax)``.  Econometric models
    share one fit per origin across horizons; neural models get one cell per
    horizon, each with its own seed stream spawned from ``seed``.
    """
    values, timestamps = _resolve_series(rv)
    n = len(values)
    max_h = max(spec.horizons)
    if n <= spec.window_size + max_h:
        raise ValueError(
            f"series of length {n} too short for window {spec.window_size} "
            f"and horizon {max_h}"
        )
    options = dict(options or {})
    options.pop("refit_every", None)

    if isinstance(model, str) and model in NEURAL_MODELS:
        result: dict[int, ForecastSet] = {}
        base = seed_sequence(seed)
        for h in sorted(spec.horizons):
            cell = _build_cell(model, h, options, seed_sequence(base, spawn_key=(h,)))
            result.update(_run_cell(cell, values, timestamps, model, spec, (h,)))
        return result

    name = model if isinstance(model, str) else type(model).__name__
    cell = _build_cell(model, 1, options, seed_sequence(seed)) if isinstance(model, str) else model
    return _run_cell(cell, values, timestamps, name, spec, tuple(sorted(spec.horizons)))


def horizon_sweep(
    models,
    rv,
    spec: RollingSpec | None = None,
    *,
    window_size: int | None = None,
    horizons: tuple[int, ...] = DEFAULT_HORIZONS,
    model_options: dict[str, dict] | None = None,
    seed=0,
) -> tuple[LossTable, dict[tuple[str, int], ForecastSet]]:
    """Full (model, horizon) loss grid plus the underlying forecast sets.

    Either pass a ready ``spec`` (its refit cadence then applies to every
    model) or a ``window_size``, in which case each model uses its default
    cadence unless overridden in ``model_options[name]['refit_every']``.
    """
    if spec is None:
        if window_size is None:
            raise ValueError("pass either spec or window_size")
    model_options = model_options or {}
    names = tuple(models)
    base = seed_sequence(seed)
    table = LossTable(models=names, horizons=tuple(sorted(horizons)))
    forecast_sets: dict[tuple[str, int], ForecastSet] = {}
    for m_index, name in enumerate(names):
        options = dict(model_options.get(name, {}))
        if spec is None:
            cadence = int(options.get("refit_every", default_refit_every(name)))
            model_spec = RollingSpec(window_size=window_size,
                                     horizons=tuple(sorted(horizons)),
                                     refit_every=cadence)
        else:
            model_spec = spec
            cadence = spec.refit_every
        sets = rolling_forecast(name, rv, model_spec, options=options,
                                seed=seed_sequence(base, spawn_key=(m_index,)))
        for h, fs in sets.items():
            forecast_sets[(name, h)] = fs
            table.cells.append(loss_cell(fs, cadence))
    return table, forecast_sets


# ---------------------------------------------------------------------------
# forecast-set CSV interchange


def write_forecast_csv(forecasts: ForecastSet, path) -> None:
    """Serialize records as ``timestamp,predicted,actual`` at full precision."""
    from .series import format_timestamp

    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("timestamp,predicted,actual\n")
        for ts, pred, actual in zip(forecasts.timestamps, forecasts.predicted,
                                    forecasts.actual):
            fh.write(f"{format_timestamp(ts)},{pred:.17g},{actual:.17g}\n")


def read_forecast_csv(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Load (timestamps, predicted, actual) from a forecast CSV."""
    import csv as _csv

    timestamps: list[str] = []
    predicted: list[float] = []
    actual: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["timestamp", "predicted", "actual"]:
            raise ValueError(f"{path}: expected header 'timestamp,predicted,actual'")
        for row in reader:
            if not row:
                continue
            timestamps.append(row[0])
            predicted.append(float(row[1]))
            actual.append(float(row[2]))
    return timestamps, np.asarray(predicted), np.asarray(actual)
