"""Sliding-window supervision pairs for the recurrent models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .._validation import as_float_array


@dataclass(frozen=True)
class WindowedDataset:
    """Inputs [samples, sequence_length, 1] and targets [samples, output_days].

    Sample i reads values[i : i+seq] and predicts values[i+seq : i+seq+output],
    so no input window ever overlaps its own target.
    """

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.inputs.ndim != 3 or self.inputs.shape[2] != 1:
            raise ValueError(f"inputs must be [samples, seq, 1], got {self.inputs.shape}")
        if self.targets.ndim != 2 or self.targets.shape[0] != self.inputs.shape[0]:
            raise ValueError("targets must be [samples, output_days] aligned with inputs")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def sequence_length(self) -> int:
        return self.inputs.shape[1]

    @property
    def output_days(self) -> int:
        return self.targets.shape[1]


def make_windows(values, sequence_length: int = 12,
                 output_days: int = 1) -> WindowedDataset:
    """Slide a window of ``sequence_length`` over the series.

    Yields n - sequence_length - output_days + 1 samples.
    """
    v = as_float_array(values, "values")
    if sequence_length < 1 or output_days < 1:
        raise ValueError("sequence_length and output_days must be >= 1")
    n_samples = len(v) - sequence_length - output_days + 1
    if n_samples < 1:
        raise ValueError(
            f"series of length {len(v)} too short for sequence_length={sequence_length} "
            f"and output_days={output_days}"
        )
    windows = sliding_window_view(v, sequence_length + output_days)[:n_samples]
    inputs = np.ascontiguousarray(windows[:, :sequence_length])[..., np.newaxis]
    targets = np.ascontiguousarray(windows[:, sequence_length:])
    return WindowedDataset(inputs=inputs, targets=targets)
