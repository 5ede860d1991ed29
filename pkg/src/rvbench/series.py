"""Price, return, and realized-volatility series construction.

The pipeline is: a positive price path sampled at a declared frequency,
log returns between consecutive observations, and realized volatility (RV)
either as the squared per-period return (one sample per bucket) or as the
sum of squared intraperiod returns aggregated into coarser clock-aligned
buckets.  All construction here is pure; series objects are immutable.

CSV interchange uses a strict two-column format, header included:
``timestamp,price`` on the way in, ``timestamp,rv`` on the way out, with
ISO-8601 timestamps and full double precision (17 significant digits).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

PRICE_FREQUENCIES = ("daily", "minute")
RV_FREQUENCIES = ("daily", "hourly", "minute")

_STEP_SECONDS = {"daily": 86_400, "hourly": 3_600, "minute": 60}
_BUCKET_LABEL = {86_400: "daily", 3_600: "hourly", 60: "minute"}


class CsvFormatError(ValueError):
    """Malformed input CSV; carries the 1-based offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _check_timestamps(timestamps: np.ndarray, n_expected: int) -> None:
    if timestamps.dtype.kind != "M":
        raise TypeError("timestamps must be a numpy datetime64 array")
    if len(timestamps) != n_expected:
        raise ValueError(
            f"timestamps and values disagree in length: {len(timestamps)} vs {n_expected}"
        )
    if len(timestamps) > 1:
        gaps = np.diff(timestamps.astype("datetime64[s]").astype(np.int64))
        if np.any(gaps == 0):
            i = int(np.flatnonzero(gaps == 0)[0])
            raise ValueError(f"duplicate timestamp at index {i + 1}: {timestamps[i + 1]}")
        if np.any(gaps < 0):
            i = int(np.flatnonzero(gaps < 0)[0])
            raise ValueError(f"timestamps not increasing at index {i + 1}: {timestamps[i + 1]}")


@dataclass(frozen=True)
class PriceSeries:
    """Strictly increasing timestamps with positive prices."""

    timestamps: np.ndarray
    prices: np.ndarray
    frequency: str

    def __post_init__(self):
        prices = np.ascontiguousarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        if self.frequency not in PRICE_FREQUENCIES:
            raise ValueError(f"frequency must be one of {PRICE_FREQUENCIES}, got {self.frequency!r}")
        if len(prices) < 2:
            raise ValueError("a price series needs at least 2 observations")
        if not np.all(np.isfinite(prices)):
            i = int(np.flatnonzero(~np.isfinite(prices))[0])
            raise ValueError(f"non-finite price at index {i}")
        if np.any(prices <= 0):
            i = int(np.flatnonzero(prices <= 0)[0])
            raise ValueError(f"non-positive price {prices[i]} at index {i}")
        _check_timestamps(self.timestamps, len(prices))

    def __len__(self) -> int:
        return len(self.prices)

    def _slice(self, lo: int, hi: int) -> "PriceSeries":
        return replace(self, timestamps=self.timestamps[lo:hi], prices=self.prices[lo:hi])


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns; one fewer observation than the source price series."""

    timestamps: np.ndarray
    returns: np.ndarray
    frequency: str

    def __post_init__(self):
        returns = np.ascontiguousarray(self.returns, dtype=float)
        object.__setattr__(self, "returns", returns)
        if self.frequency not in PRICE_FREQUENCIES:
            raise ValueError(f"frequency must be one of {PRICE_FREQUENCIES}, got {self.frequency!r}")
        if not np.all(np.isfinite(returns)):
            i = int(np.flatnonzero(~np.isfinite(returns))[0])
            raise ValueError(f"non-finite return at index {i}")
        _check_timestamps(self.timestamps, len(returns))

    def __len__(self) -> int:
        return len(self.returns)

    @property
    def values(self) -> np.ndarray:
        return self.returns

    def _slice(self, lo: int, hi: int) -> "ReturnSeries":
        return replace(self, timestamps=self.timestamps[lo:hi], returns=self.returns[lo:hi])


@dataclass(frozen=True)
class RvSeries:
    """Realized volatility per bucket, in variance units.

    ``samples_per_bucket`` is the nominal number of intraperiod returns per
    bucket (1 for the squared-return construction).
    """

    timestamps: np.ndarray
    values: np.ndarray
    frequency: str
    samples_per_bucket: int = 1

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.frequency not in RV_FREQUENCIES:
            raise ValueError(f"frequency must be one of {RV_FREQUENCIES}, got {self.frequency!r}")
        if self.samples_per_bucket < 1:
            raise ValueError("samples_per_bucket must be a positive integer")
        if not np.all(np.isfinite(values)):
            i = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValueError(f"non-finite RV at index {i}")
        if np.any(values < 0):
            i = int(np.flatnonzero(values < 0)[0])
            raise ValueError(f"negative RV {values[i]} at index {i}")
        _check_timestamps(self.timestamps, len(values))

    def __len__(self) -> int:
        return len(self.values)

    def _slice(self, lo: int, hi: int) -> "RvSeries":
        return replace(self, timestamps=self.timestamps[lo:hi], values=self.values[lo:hi])


@dataclass(frozen=True)
class SplitSpec:
    """Contiguous train/test partition, train first."""

    train_fraction: float
    train: object
    test: object


# ---------------------------------------------------------------------------
# construction


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Log return between consecutive prices: r[i] = ln(p[i+1] / p[i]).

    The i-th return is stamped with the *later* timestamp (the interval end).
    """
    r = np.diff(np.log(prices.prices))
    return ReturnSeries(
        timestamps=prices.timestamps[1:], returns=r, frequency=prices.frequency
    )


def rv_from_squared_returns(returns: ReturnSeries) -> RvSeries:
    """Squared-return RV: one sample per bucket, same timestamps."""
    return RvSeries(
        timestamps=returns.timestamps,
        values=returns.returns**2,
        frequency="daily" if returns.frequency == "daily" else "minute",
        samples_per_bucket=1,
    )


def parse_bucket(bucket) -> int:
    """Normalize a bucket duration to whole seconds.

    Accepts ``np.timedelta64``, an integer number of seconds, or a string
    of the form ``"<n><unit>"`` with unit in {s, min, h, d}.
    """
    if isinstance(bucket, np.timedelta64):
        return int(bucket.astype("timedelta64[s]").astype(np.int64))
    if isinstance(bucket, int):
        return bucket
    text = str(bucket).strip()
    for suffix, mult in (("min", 60), ("s", 1), ("h", 3_600), ("d", 86_400)):
        if text.endswith(suffix):
            try:
                count = int(text[: -len(suffix)])
            except ValueError:
                break
            return count * mult
    raise ValueError(f"cannot parse bucket duration {bucket!r}")


def rv_aggregate(returns: ReturnSeries, bucket) -> RvSeries:
    """Sum squared returns into clock-aligned buckets.

    A return stamped t belongs to the bucket whose close is the smallest
    bucket-multiple >= t, so bucket boundaries fall on whole clock units
    (hours for the hourly mode).  Buckets containing no observed return are
    omitted rather than emitted as zeros: absent data is not zero variance.
    """
    step = _STEP_SECONDS[returns.frequency]
    b = parse_bucket(bucket)
    if b not in _BUCKET_LABEL:
        raise ValueError(f"unsupported bucket duration {b}s; use one of {sorted(_BUCKET_LABEL)}")
    if b < step:
        raise ValueError(f"bucket ({b}s) is finer than the series frequency ({step}s)")
    if len(returns) == 0:
        raise ValueError("cannot aggregate an empty return series")
    ts = returns.timestamps.astype("datetime64[s]").astype(np.int64)
    span = int(ts[-1] - ts[0])
    if b > span + step:
        raise ValueError(
            f"bucket ({b}s) is coarser than the whole series (span {span}s)"
        )

    closes = ((ts + b - 1) // b) * b
    r2 = returns.returns**2
    # closes is sorted since timestamps are; reduce by run
    boundaries = np.flatnonzero(np.diff(closes)) + 1
    starts = np.concatenate(([0], boundaries))
    sums = np.add.reduceat(r2, starts)
    out_ts = (closes[starts]).astype("datetime64[s]")
    return RvSeries(
        timestamps=out_ts,
        values=sums,
        frequency=_BUCKET_LABEL[b],
        samples_per_bucket=b // step,
    )


def split(series, train_fraction: float) -> SplitSpec:
    """Contiguous split with train length = floor(train_fraction * n)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(series)
    n_train = math.floor(train_fraction * n)
    if n_train < 2:
        raise ValueError(f"split leaves only {n_train} training observations (need >= 2)")
    return SplitSpec(
        train_fraction=train_fraction,
        train=series._slice(0, n_train),
        test=series._slice(n_train, n),
    )


# ---------------------------------------------------------------------------
# CSV interchange


def _parse_iso_timestamp(text: str, line_number: int) -> datetime:
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError:
        raise CsvFormatError(f"invalid ISO-8601 timestamp {text!r}", line_number) from None
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt


def read_price_csv(path, frequency: str) -> PriceSeries:
    """Load a ``timestamp,price`` CSV (UTF-8, ISO-8601 timestamps).

    Duplicate or backwards timestamps and non-positive or non-numeric prices
    are hard errors naming the offending line; silently repairing vendor
    faults hides them.
    """
    path = Path(path)
    timestamps: list[np.datetime64] = []
    prices: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["timestamp", "price"]:
            raise CsvFormatError("expected header 'timestamp,price'", 1)
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CsvFormatError(f"expected 2 columns, got {len(row)}", line_number)
            dt = _parse_iso_timestamp(row[0], line_number)
            try:
                price = float(row[1])
            except ValueError:
                raise CsvFormatError(f"non-numeric price {row[1]!r}", line_number) from None
            if not math.isfinite(price) or price <= 0:
                raise CsvFormatError(f"non-positive price {row[1]!r}", line_number)
            timestamps.append(np.datetime64(dt.isoformat(), "s"))
            prices.append(price)
    if len(prices) < 2:
        raise CsvFormatError("need at least 2 price rows", len(prices) + 1)
    ts = np.array(timestamps, dtype="datetime64[s]")
    try:
        return PriceSeries(timestamps=ts, prices=np.asarray(prices), frequency=frequency)
    except ValueError as exc:
        raise CsvFormatError(str(exc), 1) from exc


def format_timestamp(ts: np.datetime64) -> str:
    return np.datetime_as_string(ts.astype("datetime64[s]"), unit="s")


def write_rv_csv(rv: RvSeries, path) -> None:
    """Serialize as ``timestamp,rv`` with 17 significant digits."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("timestamp,rv\n")
        for ts, value in zip(rv.timestamps, rv.values):
            fh.write(f"{format_timestamp(ts)},{value:.17g}\n")


def read_rv_csv(path, frequency: str, samples_per_bucket: int = 1) -> RvSeries:
    """Load a ``timestamp,rv`` CSV produced by :func:`write_rv_csv`."""
    path = Path(path)
    timestamps: list[np.datetime64] = []
    values: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["timestamp", "rv"]:
            raise CsvFormatError("expected header 'timestamp,rv'", 1)
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CsvFormatError(f"expected 2 columns, got {len(row)}", line_number)
            dt = _parse_iso_timestamp(row[0], line_number)
            try:
                value = float(row[1])
            except ValueError:
                raise CsvFormatError(f"non-numeric rv {row[1]!r}", line_number) from None
            timestamps.append(np.datetime64(dt.isoformat(), "s"))
            values.append(value)
    ts = np.array(timestamps, dtype="datetime64[s]")
    return RvSeries(
        timestamps=ts,
        values=np.asarray(values),
        frequency=frequency,
        samples_per_bucket=samples_per_bucket,
    )
