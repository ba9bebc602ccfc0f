"""Daily OHLCV ingestion, calendar alignment and chronological splitting.

All containers are immutable after construction (numpy buffers are marked
read-only), so every operation here is a pure function that is safe to call
concurrently.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, datetime

import numpy as np

from .errors import AlignmentError, InputError, ParseError, SplitError, ValidationError
from .validation import readonly

PRICE_CHANNELS = ("open", "high", "low", "close")
CHANNELS = PRICE_CHANNELS + ("volume",)

_REQUIRED_COLUMNS = ("date", "open", "high", "low", "close")


@dataclass(frozen=True)
class SeriesFrame:
    """One instrument's dated OHLCV table, sorted by date.

    ``volume_missing`` flags files that carried no volume column; their
    volume is stored as zeros and volume-based analyses should refuse them.
    """

    instrument: str
    dates: tuple[date, ...]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray
    volume_missing: bool = False

    def __post_init__(self):
        n = len(self.dates)
        for name in CHANNELS:
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValidationError(
                    f"{self.instrument}: channel '{name}' has length "
                    f"{arr.shape[0]}, expected {n}"
                )
            object.__setattr__(self, name, readonly(arr))
        _check_rows(self.instrument, self.dates, self.open, self.high,
                    self.low, self.close, self.volume)

    def __len__(self) -> int:
        return len(self.dates)

    def channel(self, name: str) -> np.ndarray:
        if name not in CHANNELS:
            raise InputError(f"unknown channel '{name}' (choose from {CHANNELS})")
        return getattr(self, name)

    def restrict(self, start: date | None = None, end: date | None = None) -> "SeriesFrame":
        """Rows with start <= date <= end (either bound optional)."""
        keep = [i for i, d in enumerate(self.dates)
                if (start is None or d >= start) and (end is None or d <= end)]
        if not keep:
            raise ValidationError(
                f"{self.instrument}: no rows left in range [{start}, {end}]"
            )
        idx = np.asarray(keep)
        return SeriesFrame(
            instrument=self.instrument,
            dates=tuple(self.dates[i] for i in keep),
            open=self.open[idx], high=self.high[idx], low=self.low[idx],
            close=self.close[idx], volume=self.volume[idx],
            volume_missing=self.volume_missing,
        )

    def to_csv(self) -> str:
        """Serialize back to the ingestion format (lossless round-trip)."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["Date", "Open", "High", "Low", "Close", "Volume"])
        for i, d in enumerate(self.dates):
            writer.writerow([
                d.isoformat(),
                repr(float(self.open[i])), repr(float(self.high[i])),
                repr(float(self.low[i])), repr(float(self.close[i])),
                repr(float(self.volume[i])),
            ])
        return out.getvalue()


@dataclass(frozen=True)
class AlignedPanel:
    """Several instruments' values joined on a shared trading-date axis."""

    dates: tuple[date, ...]
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.dates)
        if any(self.dates[i] >= self.dates[i + 1] for i in range(n - 1)):
            raise ValidationError("panel dates must be strictly increasing")
        for label, values in self.columns.items():
            if values.shape != (n,):
                raise ValidationError(
                    f"column '{label}' has length {values.shape[0]}, expected {n}"
                )
            self.columns[label] = readonly(values)

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    def matrix(self) -> np.ndarray:
        return np.column_stack([self.columns[k] for k in self.columns])

    def slice_rows(self, start: int, stop: int) -> "AlignedPanel":
        return AlignedPanel(
            dates=self.dates[start:stop],
            columns={k: v[start:stop] for k, v in self.columns.items()},
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["Date", *self.columns])
        for i, d in enumerate(self.dates):
            writer.writerow([d.isoformat()] +
                            [repr(float(v[i])) for v in self.columns.values()])
        return out.getvalue()


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric feature matrix with column labels and optional row dates."""

    values: np.ndarray
    labels: tuple[str, ...]
    dates: tuple[date, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError("DesignMatrix values must be 2-dimensional")
        if values.shape[1] != len(self.labels):
            raise InputError(
                f"{len(self.labels)} labels for {values.shape[1]} columns"
            )
        if self.dates is not None and len(self.dates) != values.shape[0]:
            raise InputError(
                f"{len(self.dates)} dates for {values.shape[0]} rows"
            )
        object.__setattr__(self, "values", readonly(values))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def column(self, label: str) -> np.ndarray:
        try:
            j = self.labels.index(label)
        except ValueError:
            raise InputError(f"no column labelled '{label}'") from None
        return self.values[:, j]

    def slice_rows(self, start: int, stop: int) -> "DesignMatrix":
        dates = self.dates[start:stop] if self.dates is not None else None
        return DesignMatrix(self.values[start:stop], self.labels, dates)


def _check_rows(instrument, dates, open_, high, low, close, volume):
    for i in range(len(dates) - 1):
        if dates[i] == dates[i + 1]:
            raise ValidationError(f"{instrument}: duplicate date {dates[i]}")
        if dates[i] > dates[i + 1]:
            raise ValidationError(
                f"{instrument}: dates out of order at {dates[i + 1]}"
            )
    prices = np.stack([open_, high, low, close])
    if prices.size and (not np.all(np.isfinite(prices)) or np.any(prices <= 0)):
        bad = int(np.argwhere(~(np.isfinite(prices) & (prices > 0)))[0][1])
        raise ValidationError(
            f"{instrument}: non-positive or non-finite price on {dates[bad]}"
        )
    if volume.size and (not np.all(np.isfinite(volume)) or np.any(volume < 0)):
        bad = int(np.argwhere(~(np.isfinite(volume) & (volume >= 0)))[0][0])
        raise ValidationError(f"{instrument}: negative volume on {dates[bad]}")
    lo_bad = low > np.minimum(open_, close)
    hi_bad = high < np.maximum(open_, close)
    if np.any(lo_bad | hi_bad):
        bad = int(np.argwhere(lo_bad | hi_bad)[0][0])
        raise ValidationError(
            f"{instrument}: OHLC inconsistency on {dates[bad]} "
            f"(open={open_[bad]}, high={high[bad]}, low={low[bad]}, close={close[bad]})"
        )


def _detect_date_format(token: str) -> str:
    token = token.strip()
    if len(token) == 10 and token[4] == "-" and token[7] == "-":
        return "iso"
    if token.count("/") == 2:
        return "us"
    raise ParseError(f"unrecognized date format '{token}' "
                     "(expected YYYY-MM-DD or MM/DD/YYYY)")


def _parse_date(token: str, fmt: str, line: int) -> date:
    token = token.strip()
    try:
        if fmt == "iso":
            return date.fromisoformat(token)
        return datetime.strptime(token, "%m/%d/%Y").date()
    except ValueError:
        raise ParseError(f"malformed date '{token}'", line=line) from None


def _parse_price(token: str, column: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric {column} '{token}'", line=line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {column} '{token}'", line=line)
    return value


def parse_ohlcv_csv(text: str, instrument: str) -> SeriesFrame:
    """Parse one instrument's OHLCV CSV.

    The header must name Date, Open, High, Low and Close (case-insensitive,
    extra columns such as adjusted closes are ignored). Volume is optional;
    when absent it is stored as zeros and the frame is flagged. Rows may
    arrive in any order and are sorted by date.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input", line=1) from None
    positions = {name.strip().lower(): i for i, name in enumerate(header)}
    missing = [c for c in _REQUIRED_COLUMNS if c not in positions]
    if missing:
        raise ParseError(f"header missing column(s): {', '.join(missing)}", line=1)
    has_volume = "volume" in positions

    rows = []
    date_fmt = None
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}",
                             line=line_no)
        if date_fmt is None:
            date_fmt = _detect_date_format(row[positions["date"]])
        d = _parse_date(row[positions["date"]], date_fmt, line_no)
        o = _parse_price(row[positions["open"]], "open", line_no)
        h = _parse_price(row[positions["high"]], "high", line_no)
        l = _parse_price(row[positions["low"]], "low", line_no)
        c = _parse_price(row[positions["close"]], "close", line_no)
        v = _parse_price(row[positions["volume"]], "volume", line_no) if has_volume else 0.0
        rows.append((d, o, h, l, c, v))

    if not rows:
        raise ParseError("no data rows", line=2)
    rows.sort(key=lambda r: r[0])
    cols = list(zip(*rows))
    return SeriesFrame(
        instrument=instrument,
        dates=tuple(cols[0]),
        open=np.asarray(cols[1], dtype=float),
        high=np.asarray(cols[2], dtype=float),
        low=np.asarray(cols[3], dtype=float),
        close=np.asarray(cols[4], dtype=float),
        volume=np.asarray(cols[5], dtype=float),
        volume_missing=not has_volume,
    )


def read_ohlcv_csv(path, instrument: str | None = None) -> SeriesFrame:
    """parse_ohlcv_csv on a file, instrument defaulting to the file stem."""
    from pathlib import Path

    p = Path(path)
    if not p.exists():
        raise InputError(f"input file not found: {p}")
    return parse_ohlcv_csv(p.read_text(), instrument or p.stem)


def align_inner(frames: list[SeriesFrame], channel: str = "close") -> AlignedPanel:
    """Inner-join frames on their common trading dates.

    Dropping non-common days (rather than forward-filling) avoids
    fabricating prices on days an instrument did not trade.
    """
    if len(frames) < 2:
        raise InputError("alignment needs at least 2 frames")
    if channel not in CHANNELS:
        raise InputError(f"unknown channel '{channel}' (choose from {CHANNELS})")
    common = set(frames[0].dates)
    for frame in frames[1:]:
        common &= set(frame.dates)
    if not common:
        ranges = "; ".join(
            f"{f.instrument}: {f.dates[0]}..{f.dates[-1]}" for f in frames
        )
        raise AlignmentError(f"no common dates between instruments ({ranges})")
    dates = tuple(sorted(common))
    columns: dict[str, np.ndarray] = {}
    for frame in frames:
        index = {d: i for i, d in enumerate(frame.dates)}
        take = np.asarray([index[d] for d in dates])
        columns[frame.instrument] = frame.channel(channel)[take]
    return AlignedPanel(dates=dates, columns=columns)


def chronological_split(data, train_fraction: float):
    """Split time-ordered rows into (head, tail) without shuffling.

    The head holds the first floor(n * train_fraction) rows. Works on any
    container exposing ``n_rows`` and ``slice_rows`` (AlignedPanel,
    DesignMatrix, LagMatrix).
    """
    if not 0.0 < train_fraction < 1.0:
        raise SplitError(f"train fraction must be in (0, 1), got {train_fraction}")
    n = data.n_rows
    if n < 2:
        raise SplitError(f"need at least 2 rows to split, got {n}")
    head_n = int(math.floor(n * train_fraction))
    if head_n == 0 or head_n == n:
        raise SplitError(
            f"fraction {train_fraction} leaves an empty side for {n} rows"
        )
    return data.slice_rows(0, head_n), data.slice_rows(head_n, n)
