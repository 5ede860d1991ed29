"""Command-line front end: ``summarize``, ``backtest``, and ``plot``.

Every command takes ``--config <path>`` and ``--out <dir>``; ``--seed``
overrides the config seed.  Commands exit 0 on success and nonzero with a
single-line ``error: ...`` message on stderr otherwise, and never mutate
their input files.  Output layout under the run directory:

    forecasts/<model>_<horizon>.csv
    losses.csv
    losses.json
    meta.json
    summary.csv          (summarize)
    plots/*.svg          (plot)
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from ._rng import seed_sequence
from .backtest import (
    LOSS_FAMILIES,
    LossTable,
    RollingSpec,
    default_refit_every,
    loss_cell,
    read_forecast_csv,
    rolling_forecast,
    write_forecast_csv,
)
from .config import ConfigError, RunConfig, load_config
from .diagnostics import adf, arch_lm, jarque_bera, ljung_box, summarize
from .nn.training import GRADIENT_CLIP_NORM
from .series import (
    CsvFormatError,
    log_returns,
    read_price_csv,
    rv_aggregate,
    rv_from_squared_returns,
)
from .svg import line_chart

SUMMARY_HEADER = "series,obs,mean,sd,min,max,skew,kurt,jb_pvalue,lb_pvalue,adf,arch_pvalue,adf_note"


def _load_series(config: RunConfig):
    prices = read_price_csv(config.data, config.frequency)
    returns = log_returns(prices)
    if config.frequency == "daily":
        rv = rv_from_squared_returns(returns)
    else:
        rv = rv_aggregate(returns, "1h")
    return returns, rv


def _resolve_out(config: RunConfig, out_arg: str | None) -> Path:
    if out_arg is not None:
        return Path(out_arg)
    if config.out is not None:
        return config.out
    raise ConfigError("no output directory: pass --out or set 'out' in the config")


# ---------------------------------------------------------------------------
# summarize


def _battery_row(label: str, values: np.ndarray) -> dict:
    n = len(values)
    stats = summarize(values)
    jb = jarque_bera(values)
    lb = ljung_box(values, lags=min(20, n - 2))
    arch = arch_lm(values, lags=min(20, max(1, (n - 2) // 2 - 1)))
    greene = int(12 * (n / 100.0) ** 0.25)
    unit_root = adf(values, max_lag=max(0, min(greene, n - 11)))
    return {
        "series": label, "obs": stats.n, "mean": stats.mean, "sd": stats.sd,
        "min": stats.minimum, "max": stats.maximum, "skew": stats.skewness,
        "kurt": stats.kurtosis, "jb_pvalue": jb.p_value, "lb_pvalue": lb.p_value,
        "adf": unit_root.statistic, "arch_pvalue": arch.p_value,
        "adf_note": unit_root.decision_note,
    }


def cmd_summarize(config: RunConfig, out_dir: Path) -> int:
    returns, rv = _load_series(config)
    rows = [_battery_row("return", returns.returns), _battery_row("rv", rv.values)]
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [SUMMARY_HEADER]
    for row in rows:
        cells = []
        for key in SUMMARY_HEADER.split(","):
            value = row[key]
            if isinstance(value, float):
                cells.append(f"{value:.17g}")
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    (out_dir / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    columns = ("series", "obs", "mean", "sd", "min", "max", "skew", "kurt",
               "jb_pvalue", "lb_pvalue", "adf")
    print("  ".join(f"{c:>10}" for c in columns))
    for row in rows:
        cells = [f"{row[c]:>10}" if not isinstance(row[c], float) else f"{row[c]:>10.4g}"
                 for c in columns]
        print("  ".join(cells))
    print(f"wrote {out_dir / 'summary.csv'}")
    return 0


# ---------------------------------------------------------------------------
# backtest


def _run_one_model(config: RunConfig, rv, window: int, index: int, name: str):
    options = dict(config.model_options.get(name, {}))
    cadence = int(options.get("refit_every", default_refit_every(name)))
    spec = RollingSpec(window_size=window, horizons=config.horizons,
                       refit_every=cadence)
    sets = rolling_forecast(
        name, rv, spec, options=options,
        seed=seed_sequence(config.seed, spawn_key=(index,)),
    )
    return name, cadence, sets


def cmd_backtest(config: RunConfig, out_dir: Path) -> int:
    _, rv = _load_series(config)
    n = len(rv)
    if config.window_size is not None:
        window = config.window_size
    else:
        window = math.floor(config.train_fraction * n)

    tasks = list(enumerate(config.models))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(
                lambda task: _run_one_model(config, rv, window, *task), tasks
            ))
    else:
        results = [_run_one_model(config, rv, window, i, name) for i, name in tasks]

    out_dir.mkdir(parents=True, exist_ok=True)
    forecast_dir = out_dir / "forecasts"
    forecast_dir.mkdir(exist_ok=True)
    table = LossTable(models=tuple(config.models), horizons=config.horizons)
    cadences = {}
    for name, cadence, sets in results:
        cadences[name] = cadence
        for h in sorted(sets):
            fs = sets[h]
            write_forecast_csv(fs, forecast_dir / f"{name}_{h}.csv")
            table.cells.append(loss_cell(fs, cadence))
        print(f"backtest: {name} done ({len(sets)} horizon(s), "
              f"{len(sets[min(sets)])} records at h={min(sets)})")

    (out_dir / "losses.csv").write_text(table.to_csv(), encoding="utf-8")
    (out_dir / "losses.json").write_text(
        json.dumps(table.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    meta = {
        "tool": {"name": "rvbench", "version": __version__,
                 "numpy": np.__version__, "scipy": scipy.__version__},
        "data": str(config.data),
        "frequency": config.frequency,
        "n_observations": n,
        "window_size": window,
        "horizons": list(config.horizons),
        "seed": config.seed,
        "refit_cadence": cadences,
        "seed_streams": "Philox keyed by (seed, model_index, horizon, refit_index)",
        "warm_start": "econometric refits warm-start from the previous origin's optimum",
        "gradient_clip_norm": GRADIENT_CLIP_NORM,
        "conventions": {
            "record_count": "records per horizon = n - window_size - horizon + 1",
            "variance_proxy": "garch and rgarch read the rv window as the "
                              "squared-innovation proxy (|r| = sqrt(rv))",
            "qlike_log": "mean(log(pred) + actual/pred - 1); scale-dependent, "
                         "negative for variances below one",
            "qlike_canonical": "mean(ratio - log(ratio) - 1) with ratio = "
                               "actual/pred; zero only at perfect forecasts",
            "zero_actuals": "excluded from mape and canonical qlike, counts "
                            "disclosed per cell",
            "prediction_floors": "negative predictions floored at 0 on record "
                                 "and at 1e-12 inside qlike",
        },
    }
    (out_dir / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {out_dir / 'losses.csv'}")
    return 0


# ---------------------------------------------------------------------------
# plot


def _plot_forecasts(forecast_dir: Path, plots_dir: Path) -> int:
    count = 0
    for csv_path in sorted(forecast_dir.glob("*.csv")):
        timestamps, predicted, actual = read_forecast_csv(csv_path)
        if len(predicted) == 0:
            raise ValueError(f"empty forecast file: {csv_path}")
        xs = list(range(len(predicted)))
        svg = line_chart(
            [("actual", xs, actual.tolist()), ("predicted", xs, predicted.tolist())],
            title=f"forecast vs actual: {csv_path.stem}",
            x_label="record", y_label="rv",
        )
        (plots_dir / f"forecast_{csv_path.stem}.svg").write_text(svg, encoding="utf-8")
        count += 1
    return count


def _plot_trends(losses_csv: Path, plots_dir: Path) -> int:
    lines = losses_csv.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    horizons = [int(h) for h in header[2:]]
    by_family: dict[str, list[tuple[str, list[float]]]] = {}
    for line in lines[1:]:
        cells = line.split(",")
        family, model = cells[0], cells[1]
        by_family.setdefault(family, []).append(
            (model, [float(v) for v in cells[2:]])
        )
    count = 0
    for family, rows in by_family.items():
        series = [(model, horizons, values) for model, values in rows]
        svg = line_chart(series, title=f"{family} vs horizon",
                         x_label="horizon", y_label=family)
        (plots_dir / f"trend_{family}.svg").write_text(svg, encoding="utf-8")
        count += 1
    return count


def cmd_plot(config: RunConfig, out_dir: Path) -> int:
    forecast_dir = out_dir / "forecasts"
    losses_csv = out_dir / "losses.csv"
    if not forecast_dir.is_dir():
        raise ValueError(f"no forecasts directory under {out_dir}; run backtest first")
    plots_dir = out_dir / "plots"
    plots_dir.mkdir(parents=True, exist_ok=True)
    n_forecast = _plot_forecasts(forecast_dir, plots_dir)
    n_trend = _plot_trends(losses_csv, plots_dir) if losses_csv.exists() else 0
    if n_forecast == 0 and n_trend == 0:
        raise ValueError(f"nothing to plot under {out_dir}")
    print(f"wrote {n_forecast + n_trend} chart(s) to {plots_dir}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rvbench",
        description="Realized-volatility forecasting: construct RV, fit models, "
                    "run rolling backtests, and plot results.",
    )
    parser.add_argument("--version", action="version", version=f"rvbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("summarize", "descriptive statistics and diagnostics for the series"),
        ("backtest", "rolling-window forecasts and the loss grid"),
        ("plot", "SVG charts from an existing backtest output directory"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out", help="output directory (overrides config 'out')")
        cmd.add_argument("--seed", type=int, help="override the config seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        out_dir = _resolve_out(config, args.out)
        if args.command == "summarize":
            return cmd_summarize(config, out_dir)
        if args.command == "backtest":
            return cmd_backtest(config, out_dir)
        return cmd_plot(config, out_dir)
    except (ConfigError, CsvFormatError, ValueError, KeyError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
