"""Run configuration: one strict JSON document drives every command.

Unknown keys are rejected at every level, including per-model option
blocks, so a typo fails loudly instead of silently falling back to a
default and poisoning reproducibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .backtest import NEURAL_MODELS, VALID_MODELS

TOP_LEVEL_KEYS = {"data", "frequency", "window_size", "train_fraction", "models",
                  "horizons", "seed", "out", "workers"}

_ECON_KEYS = {"max_evals", "refit_every"}
_HAR_KEYS = {"weekly_window", "monthly_window", "refit_every"}
_NEURAL_KEYS = {"hidden_units", "dense_units", "sequence_length", "learning_rate",
                "epochs", "batch_size", "dropout_rate", "patience", "min_delta",
                "refit_every"}

MODEL_OPTION_KEYS = {
    "garch": _ECON_KEYS,
    "rgarch": _ECON_KEYS,
    "har": _HAR_KEYS,
    **{name: _NEURAL_KEYS for name in NEURAL_MODELS},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    data: Path
    frequency: str
    models: list[str]
    model_options: dict[str, dict] = field(default_factory=dict)
    horizons: tuple[int, ...] = (1,)
    seed: int = 0
    window_size: int | None = None
    train_fraction: float | None = None
    out: Path | None = None
    workers: int = 1


def _parse_models(raw) -> tuple[list[str], dict[str, dict]]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'models' must be a nonempty list")
    names: list[str] = []
    options: dict[str, dict] = {}
    for entry in raw:
        if isinstance(entry, str):
            name, opts = entry, {}
        elif isinstance(entry, dict):
            if "name" not in entry:
                raise ConfigError("model entries given as objects need a 'name' key")
            name = entry["name"]
            opts = {k: v for k, v in entry.items() if k != "name"}
        else:
            raise ConfigError(f"model entry must be a string or object, got {entry!r}")
        if name not in VALID_MODELS:
            raise ConfigError(
                f"unknown model {name!r}; valid names are {{{', '.join(VALID_MODELS)}}}"
            )
        if name in names:
            raise ConfigError(f"model {name!r} listed twice")
        unknown = set(opts) - MODEL_OPTION_KEYS[name]
        if unknown:
            raise ConfigError(
                f"unknown option key {sorted(unknown)[0]!r} for model {name!r}"
            )
        names.append(name)
        options[name] = opts
    return names, options


def load_config(path) -> RunConfig:
    """Parse and validate a config file; paths resolve against its directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(raw) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    for key in ("data", "frequency", "models"):
        if key not in raw:
            raise ConfigError(f"missing required config key {key!r}")

    data = (path.parent / raw["data"]).resolve()
    if not data.exists():
        raise ConfigError(f"data file does not exist: {data}")
    frequency = raw["frequency"]
    if frequency not in ("daily", "minute"):
        raise ConfigError(f"frequency must be 'daily' or 'minute', got {frequency!r}")

    window_size = raw.get("window_size")
    train_fraction = raw.get("train_fraction")
    if (window_size is None) == (train_fraction is None):
        raise ConfigError("set exactly one of 'window_size' and 'train_fraction'")
    if window_size is not None and (not isinstance(window_size, int) or window_size < 30):
        raise ConfigError(f"window_size must be an integer >= 30, got {window_size!r}")
    if train_fraction is not None and not 0.0 < float(train_fraction) < 1.0:
        raise ConfigError(f"train_fraction must lie in (0, 1), got {train_fraction!r}")

    horizons = raw.get("horizons", [1])
    if (not isinstance(horizons, list) or not horizons
            or any(not isinstance(h, int) or h < 1 for h in horizons)):
        raise ConfigError("'horizons' must be a nonempty list of integers >= 1")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"workers must be a positive integer, got {workers!r}")

    models, model_options = _parse_models(raw["models"])
    out = raw.get("out")
    return RunConfig(
        data=data,
        frequency=frequency,
        models=models,
        model_options=model_options,
        horizons=tuple(sorted(set(horizons))),
        seed=seed,
        window_size=window_size,
        train_fraction=float(train_fraction) if train_fraction is not None else None,
        out=(path.parent / out).resolve() if out is not None else None,
        workers=workers,
    )
