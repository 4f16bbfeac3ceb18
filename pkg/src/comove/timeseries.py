"""Aligned multivariate time series: CSV loading, windowing, rescaling.

All analysis code in this package consumes :class:`MultiSeries`, a bundle of
equal-length, date-aligned series on a uniform grid. Loading is deliberately
strict: rows with missing values are dropped (and counted), duplicate or
unparseable dates are errors, and any window handed to the transforms must
keep at least ``MIN_LENGTH`` samples.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass, field

import numpy as np

MIN_LENGTH = 8
MAX_SERIES = 8

_DATE_FORMATS = ("%Y-%m-%d", "%d.%m.%Y")


class DataError(ValueError):
    """Input data violates a contract (bad dates, short windows, NaNs...)."""


def parse_date(text: str) -> _dt.date:
    """Parse ``YYYY-MM-DD`` or ``DD.MM.YYYY`` into a date.

    Raises
    ------
    DataError
        If the text matches neither format.
    """
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return _dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise DataError(f"unparseable date: {text!r}")


@dataclass(frozen=True)
class LoadReport:
    """Counts accumulated while reading a CSV file."""

    path: str
    rows_read: int
    rows_kept: int
    rows_dropped: int

    def summary(self) -> str:
        return (
            f"{self.path}: read {self.rows_read} rows, kept {self.rows_kept}, "
            f"dropped {self.rows_dropped} with missing values"
        )


@dataclass(frozen=True)
class TimeSeries:
    """A single named series on a strictly increasing daily date grid.

    Arrays are locked read-only on construction; derive new instances rather
    than mutating in place.
    """

    name: str
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype="datetime64[D]")
        vals = np.asarray(self.values, dtype=float)
        if ts.ndim != 1 or vals.ndim != 1:
            raise DataError("timestamps and values must be one-dimensional")
        if ts.shape != vals.shape:
            raise DataError(
                f"series {self.name!r}: {ts.size} timestamps vs {vals.size} values"
            )
        if ts.size < MIN_LENGTH:
            raise DataError(
                f"series {self.name!r} has {ts.size} samples, need at least {MIN_LENGTH}"
            )
        if not np.all(np.isfinite(vals)):
            raise DataError(f"series {self.name!r} contains non-finite values")
        steps = np.diff(ts.astype("int64"))
        if np.any(steps <= 0):
            raise DataError(f"series {self.name!r}: timestamps not strictly increasing")
        ts = ts.copy()
        vals = vals.copy()
        ts.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class MultiSeries:
    """Up to ``MAX_SERIES`` series sharing one timestamp grid.

    Parameters
    ----------
    series : tuple of TimeSeries
        The aligned series, order significant (index 0 is the default target).
    dt : float
        Sampling step in the time unit used by the transforms (default 1.0,
        one step per row regardless of calendar gaps).
    """

    series: tuple[TimeSeries, ...]
    dt: float = 1.0
    load_report: LoadReport | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.series, tuple):
            object.__setattr__(self, "series", tuple(self.series))
        if not 1 <= len(self.series) <= MAX_SERIES:
            raise DataError(
                f"need between 1 and {MAX_SERIES} series, got {len(self.series)}"
            )
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise DataError(f"dt must be a positive finite number, got {self.dt}")
        first = self.series[0]
        for s in self.series[1:]:
            if not np.array_equal(s.timestamps, first.timestamps):
                raise DataError(
                    f"series {s.name!r} is not on the same timestamp grid as "
                    f"{first.name!r}"
                )
        names = [s.name for s in self.series]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate series names: {names}")

    @property
    def p(self) -> int:
        return len(self.series)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.series)

    @property
    def timestamps(self) -> np.ndarray:
        return self.series[0].timestamps

    def __len__(self) -> int:
        return len(self.series[0])

    def values_matrix(self) -> np.ndarray:
        """Return the data as an (n, p) float array, one column per series."""
        return np.column_stack([s.values for s in self.series])

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"no series named {name!r}; have {self.names}") from None


def load_csv(
    path: str,
    date_column: str = "date",
    value_columns: tuple[str, ...] | None = None,
    dt: float = 1.0,
) -> MultiSeries:
    """Load an aligned multivariate series from a headered CSV file.

    Rows where any selected value is missing (empty field) are dropped and
    counted; the counts are attached to the result as ``.load_report``.
    Rows are sorted by date before alignment checks.

    Parameters
    ----------
    path : str
        CSV file with a header row.
    date_column : str
        Name of the date column. Accepts ``YYYY-MM-DD`` or ``DD.MM.YYYY``.
    value_columns : tuple of str, optional
        Which columns to load, in order. Default: every non-date column in
        header order.
    dt : float
        Sampling step recorded on the result.

    Raises
    ------
    DataError
        Missing columns, unparseable or duplicate dates, non-numeric values,
        or fewer than ``MIN_LENGTH`` complete rows.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if not header:
            raise DataError(f"{path}: empty file or missing header")
        if date_column not in header:
            raise DataError(f"{path}: no column named {date_column!r} in {header}")
        if value_columns is None:
            value_columns = tuple(c for c in header if c != date_column)
        else:
            value_columns = tuple(value_columns)
            missing = [c for c in value_columns if c not in header]
            if missing:
                raise DataError(f"{path}: missing value columns {missing}")
        if not value_columns:
            raise DataError(f"{path}: no value columns")

        rows_read = 0
        dates: list[_dt.date] = []
        rows: list[list[float]] = []
        dropped = 0
        for rec in reader:
            rows_read += 1
            raw = [rec.get(c) for c in value_columns]
            if any(v is None or v.strip() == "" for v in raw):
                dropped += 1
                continue
            date_text = rec.get(date_column)
            if date_text is None or date_text.strip() == "":
                dropped += 1
                continue
            day = parse_date(date_text)
            try:
                vals = [float(v) for v in raw]  # type: ignore[arg-type]
            except ValueError as exc:
                raise DataError(f"{path}: non-numeric value on {day}: {exc}") from exc
            dates.append(day)
            rows.append(vals)

    if len(dates) != len(set(dates)):
        seen: set[_dt.date] = set()
        for day in dates:
            if day in seen:
                raise DataError(f"{path}: duplicate date {day}")
            seen.add(day)
    order = np.argsort(np.array(dates, dtype="datetime64[D]"))
    if len(order) < MIN_LENGTH:
        raise DataError(
            f"{path}: {len(order)} complete rows, need at least {MIN_LENGTH}"
        )
    stamps = np.array(dates, dtype="datetime64[D]")[order]
    data = np.asarray(rows, dtype=float)[order]

    series = tuple(
        TimeSeries(name=c, timestamps=stamps, values=data[:, k])
        for k, c in enumerate(value_columns)
    )
    report = LoadReport(
        path=path, rows_read=rows_read, rows_kept=len(stamps), rows_dropped=dropped
    )
    return MultiSeries(series=series, dt=dt, load_report=report)


def window(
    ms: MultiSeries,
    start: _dt.date | str,
    end: _dt.date | str,
) -> MultiSeries:
    """Restrict to timestamps in [start, end], inclusive on both ends.

    Raises
    ------
    DataError
        If start > end, the window is empty, or fewer than ``MIN_LENGTH``
        samples survive.
    """
    if isinstance(start, str):
        start = parse_date(start)
    if isinstance(end, str):
        end = parse_date(end)
    if start > end:
        raise DataError(f"window start {start} is after end {end}")
    lo = np.datetime64(start, "D")
    hi = np.datetime64(end, "D")
    mask = (ms.timestamps >= lo) & (ms.timestamps <= hi)
    kept = int(mask.sum())
    if kept == 0:
        raise DataError(f"window [{start}, {end}] selects no samples")
    if kept < MIN_LENGTH:
        raise DataError(
            f"window [{start}, {end}] keeps {kept} samples, need at least {MIN_LENGTH}"
        )
    series = tuple(
        TimeSeries(name=s.name, timestamps=s.timestamps[mask], values=s.values[mask])
        for s in ms.series
    )
    return MultiSeries(series=series, dt=ms.dt)


def rescale(ms: MultiSeries, factors: tuple[float, ...]) -> MultiSeries:
    """Multiply each series by its factor (for plotting on a shared axis).

    Factors must be positive, finite, and one per series.
    """
    factors = tuple(float(f) for f in factors)
    if len(factors) != ms.p:
        raise DataError(f"{len(factors)} factors for {ms.p} series")
    for f in factors:
        if not (np.isfinite(f) and f > 0):
            raise DataError(f"rescale factors must be positive and finite, got {f}")
    series = tuple(
        TimeSeries(name=s.name, timestamps=s.timestamps, values=s.values * f)
        for s, f in zip(ms.series, factors)
    )
    return MultiSeries(series=series, dt=ms.dt)
