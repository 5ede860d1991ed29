"""From-scratch recurrent networks for RV forecasting."""

from .adam import Adam
from .cells import (
    KINDS,
    LEAKY_SLOPE,
    RecurrentModel,
    backprop,
    backward,
    forward,
    gru_forward,
    init_model,
    lstm_forward,
    rnn_forward,
)
from .scaling import RangeScaler
from .training import (
    ARCHITECTURES,
    GRADIENT_CLIP_NORM,
    RecurrentForecaster,
    TrainConfig,
    clip_gradients,
    default_train_config,
    predict,
    train,
)
from .windows import WindowedDataset, make_windows

__all__ = [
    "ARCHITECTURES",
    "Adam",
    "GRADIENT_CLIP_NORM",
    "KINDS",
    "LEAKY_SLOPE",
    "RangeScaler",
    "RecurrentForecaster",
    "RecurrentModel",
    "TrainConfig",
    "WindowedDataset",
    "backprop",
    "backward",
    "clip_gradients",
    "default_train_config",
    "forward",
    "gru_forward",
    "init_model",
    "lstm_forward",
    "make_windows",
    "predict",
    "rnn_forward",
    "train",
]
