"""Training loop, inference, and the estimator wrapper for the recurrent nets.

Architecture and schedule defaults per kind:

    gru:  16 recurrent units -> dense 4 (leaky rectifier) -> output head;
          50 epochs, batch 64
    lstm:  8 recurrent units -> output head; 50 epochs, batch 16
    rnn:   8 recurrent units -> output head; 30 epochs, batch 16

All three train with Adam at learning rate 1e-4 on mean squared error over
min-max-scaled values, inverted dropout (rate 0.2) on the final recurrent
hidden state, gradient clipping at global norm 1.0, and early stopping once
the epoch loss stops improving by at least ``min_delta`` for ``patience``
consecutive epochs.  Runs are bitwise reproducible per seed: the generator
is consumed in a fixed order (weight init, then per epoch one shuffle and
one dropout mask per batch).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .._rng import make_rng
from .._validation import as_float_array, check_fitted
from .adam import Adam
from .cells import KINDS, RecurrentModel, backprop, forward, init_model
from .scaling import RangeScaler
from .windows import WindowedDataset, make_windows

GRADIENT_CLIP_NORM = 1.0

ARCHITECTURES = {
    "gru": {"hidden_units": 16, "dense_units": 4, "epochs": 50, "batch_size": 64},
    "lstm": {"hidden_units": 8, "dense_units": None, "epochs": 50, "batch_size": 16},
    "rnn": {"hidden_units": 8, "dense_units": None, "epochs": 30, "batch_size": 16},
}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int
    learning_rate: float = 1e-4
    patience: int = 5
    min_delta: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1 or self.patience < 1:
            raise ValueError("batch_size and patience must be positive")
        if self.learning_rate <= 0 or self.min_delta < 0:
            raise ValueError("learning_rate must be positive and min_delta >= 0")


def default_train_config(kind: str, *, seed: int = 0) -> TrainConfig:
    arch = ARCHITECTURES[kind]
    return TrainConfig(epochs=arch["epochs"], batch_size=arch["batch_size"], seed=seed)


def clip_gradients(grads: dict[str, np.ndarray],
                   max_norm: float = GRADIENT_CLIP_NORM) -> float:
    """Scale all gradients in place so the global norm is at most max_norm."""
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    norm = float(np.sqrt(total))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def train(
    kind: str,
    dataset: WindowedDataset,
    config: TrainConfig,
    *,
    hidden_units: int | None = None,
    dense_units="default",
    dropout_rate: float = 0.2,
    seed=None,
) -> tuple[RecurrentModel, np.ndarray]:
    """Mini-batch Adam training; returns the model and per-epoch mean MSE.

    With ``epochs=0`` the model equals its seeded initialization and the
    history is empty.  At dropout rate 0 no mask is drawn, so the run is
    bitwise identical to the same run with dropout disabled.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    arch = ARCHITECTURES[kind]
    hidden = hidden_units if hidden_units is not None else arch["hidden_units"]
    dense = arch["dense_units"] if dense_units == "default" else dense_units
    rng = make_rng(config.seed if seed is None else seed)
    model = init_model(
        kind, hidden_units=hidden, sequence_length=dataset.sequence_length,
        output_days=dataset.output_days, dense_units=dense,
        dropout_rate=dropout_rate, rng=rng,
    )
    optimizer = Adam(model.params, learning_rate=config.learning_rate)
    keep = 1.0 - dropout_rate
    n = len(dataset)
    history: list[float] = []
    best = np.inf
    stale = 0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            mask = None
            if dropout_rate > 0.0:
                mask = (rng.random((len(idx), hidden)) < keep).astype(float) / keep
            loss, grads = backprop(
                model, dataset.inputs[idx], dataset.targets[idx], dropout_mask=mask
            )
            clip_gradients(grads)
            optimizer.step(grads)
            total += loss * len(idx)
        epoch_loss = total / n
        history.append(epoch_loss)
        if best - epoch_loss >= config.min_delta:
            best = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return model, np.asarray(history)


def predict(model: RecurrentModel, scaler: RangeScaler, recent) -> np.ndarray:
    """Scale, run the net in inference mode, and inverse-scale the forecast."""
    values = as_float_array(recent, "recent")
    if len(values) != model.sequence_length:
        raise ValueError(
            f"need exactly sequence_length={model.sequence_length} recent values, "
            f"got {len(values)}"
        )
    scaled = scaler.transform(values)
    y, _ = forward(model, scaled[np.newaxis, :], None)
    return scaler.inverse_transform(y[0])


class RecurrentForecaster(BaseEstimator):
    """Recurrent RV forecaster: scale, window, train; predict in RV units.

    Constructor arguments left at None resolve to the per-kind defaults in
    :data:`ARCHITECTURES` at fit time.
    """

    def __init__(self, kind: str = "gru", output_days: int = 1,
                 sequence_length: int = 12, hidden_units: int | None = None,
                 dense_units="default", dropout_rate: float = 0.2,
                 learning_rate: float = 1e-4, epochs: int | None = None,
                 batch_size: int | None = None, patience: int = 5,
                 min_delta: float = 1e-7, seed: int = 0):
        self.kind = kind
        self.output_days = output_days
        self.sequence_length = sequence_length
        self.hidden_units = hidden_units
        self.dense_units = dense_units
        self.dropout_rate = dropout_rate
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.patience = patience
        self.min_delta = min_delta
        self.seed = seed

    def _train_config(self) -> TrainConfig:
        arch = ARCHITECTURES[self.kind]
        return TrainConfig(
            epochs=arch["epochs"] if self.epochs is None else self.epochs,
            batch_size=arch["batch_size"] if self.batch_size is None else self.batch_size,
            learning_rate=self.learning_rate,
            patience=self.patience,
            min_delta=self.min_delta,
            seed=self.seed if isinstance(self.seed, int) else 0,
        )

    def fit(self, rv, y=None, *, seed=None):
        values = as_float_array(rv, "rv",
                                min_len=self.sequence_length + self.output_days + 1)
        self.scaler_ = RangeScaler().fit(values)
        dataset = make_windows(self.scaler_.transform(values),
                               self.sequence_length, self.output_days)
        config = self._train_config()
        self.model_, self.history_ = train(
            self.kind, dataset, config,
            hidden_units=self.hidden_units, dense_units=self.dense_units,
            dropout_rate=self.dropout_rate,
            seed=seed if seed is not None else self.seed,
        )
        return self

    def predict(self, recent) -> np.ndarray:
        check_fitted(self, "model_")
        return predict(self.model_, self.scaler_, recent)

    # -- checkpointing ------------------------------------------------------

    def save(self, path) -> None:
        check_fitted(self, "model_")
        m = self.model_
        doc = {
            "kind": m.kind,
            "hidden_units": m.hidden_units,
            "sequence_length": m.sequence_length,
            "output_days": m.output_days,
            "dense_units": m.dense_units,
            "dropout_rate": m.dropout_rate,
            "shapes": {name: list(p.shape) for name, p in m.params.items()},
            "weights": {name: p.ravel(order="C").tolist() for name, p in m.params.items()},
            "scaler": {"observed_min": self.scaler_.observed_min_,
                       "observed_max": self.scaler_.observed_max_},
            "config": {
                "learning_rate": self.learning_rate,
                "epochs": self.epochs,
                "batch_size": self.batch_size,
                "patience": self.patience,
                "min_delta": self.min_delta,
            },
            "seed": self.seed if isinstance(self.seed, int) else None,
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RecurrentForecaster":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        est = cls(kind=doc["kind"], output_days=doc["output_days"],
                  sequence_length=doc["sequence_length"],
                  hidden_units=doc["hidden_units"], dense_units=doc["dense_units"],
                  dropout_rate=doc["dropout_rate"], seed=doc["seed"] or 0,
                  **{k: v for k, v in doc["config"].items() if v is not None})
        params = {
            name: np.asarray(doc["weights"][name], dtype=float).reshape(shape)
            for name, shape in doc["shapes"].items()
        }
        est.model_ = RecurrentModel(
            kind=doc["kind"], hidden_units=doc["hidden_units"],
            sequence_length=doc["sequence_length"], output_days=doc["output_days"],
            dense_units=doc["dense_units"], dropout_rate=doc["dropout_rate"],
            params=params,
        )
        scaler = RangeScaler()
        scaler.observed_min_ = doc["scaler"]["observed_min"]
        scaler.observed_max_ = doc["scaler"]["observed_max"]
        est.scaler_ = scaler
        est.history_ = np.array([])
        return est
