"""Lagged-price design matrices: the "history point" construction.

Each feature column is one node of the dynamical model: either a channel's
value a fixed number of trading days back ("<channel>_lag<k>") or a
same-day covariate ("<channel>_lag0", never the target channel itself, so
no row can see its own label). Lags count trading rows, not calendar days.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .errors import InputError
from .lasso import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, LassoRegression
from .timeseries import CHANNELS, DesignMatrix, SeriesFrame
from .validation import readonly

DEFAULT_COVARIATES = ("open", "high", "low", "volume")


@dataclass(frozen=True)
class LagSpec:
    """Which channels to lag, how deep, and which same-day columns to add.

    The paper-scale configuration is four price channels at 100 history
    points plus the same-day covariates: 404 feature columns, 405 dataset
    nodes once the predicted close is counted.
    """

    channels: tuple[str, ...] = ("close",)
    history_points: int = 100
    include_current_covariates: bool = False
    covariates: tuple[str, ...] = DEFAULT_COVARIATES
    target: str = "close"

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "covariates", tuple(self.covariates))
        if self.history_points < 1:
            raise InputError(
                f"history_points must be >= 1, got {self.history_points}"
            )
        if not self.channels:
            raise InputError("at least one lag channel is required")
        for name in self.channels + self.covariates + (self.target,):
            if name not in CHANNELS:
                raise InputError(f"unknown channel '{name}' (choose from {CHANNELS})")
        if self.include_current_covariates and self.target in self.covariates:
            raise InputError(
                f"target channel '{self.target}' cannot be a same-day covariate"
            )
        if len(set(self.channels)) != len(self.channels):
            raise InputError("duplicate lag channels")
        if len(set(self.covariates)) != len(self.covariates):
            raise InputError("duplicate covariate channels")


@dataclass(frozen=True)
class LagMatrix:
    """Feature matrix, same-day target vector and per-row dates."""

    X: DesignMatrix
    y: np.ndarray
    dates: tuple[date, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "y", readonly(np.asarray(self.y, dtype=float)))
        object.__setattr__(self, "dates", tuple(self.dates))
        if self.X.n_rows != self.y.shape[0] or self.X.n_rows != len(self.dates):
            raise InputError("X, y and dates must have equal row counts")

    @property
    def n_rows(self) -> int:
        return self.X.n_rows

    @property
    def labels(self) -> tuple[str, ...]:
        return self.X.labels

    def slice_rows(self, start: int, stop: int) -> "LagMatrix":
        return LagMatrix(self.X.slice_rows(start, stop), self.y[start:stop],
                         self.dates[start:stop])

    def to_csv(self) -> str:
        lines = ["Date," + ",".join(self.labels) + ",target"]
        for i, d in enumerate(self.dates):
            cells = ",".join(repr(float(v)) for v in self.X.values[i])
            lines.append(f"{d.isoformat()},{cells},{repr(float(self.y[i]))}")
        return "\n".join(lines) + "\n"


def node_count(spec: LagSpec, include_target: bool = False) -> int:
    """Feature-column count: |channels| * H plus same-day covariates.

    ``include_target`` also counts the predicted close, matching the
    headline "405 nodes" accounting in which the current price is one of
    the dataset's columns.
    """
    count = len(spec.channels) * spec.history_points
    if spec.include_current_covariates:
        count += len(spec.covariates)
    if include_target:
        count += 1
    return count


def build_lag_matrix(frame: SeriesFrame, spec: LagSpec) -> LagMatrix:
    """Assemble the lag design for one instrument.

    Row at date d holds, for every lag channel c and depth k in 1..H, the
    value of c exactly k trading rows before d; the first H rows of the
    series are dropped rather than imputed. The target is the same-day
    value of ``spec.target``.
    """
    n = len(frame)
    h = spec.history_points
    if n <= h:
        raise InputError(
            f"{frame.instrument}: {n} rows is too short for history_points={h} "
            f"(need at least {h + 1})"
        )
    wanted = set(spec.channels) | {spec.target}
    if spec.include_current_covariates:
        wanted |= set(spec.covariates)
    if "volume" in wanted and frame.volume_missing:
        raise InputError(
            f"{frame.instrument}: volume channel requested but the source "
            "file had no volume column"
        )
    columns = []
    labels = []
    for channel in spec.channels:
        series = frame.channel(channel)
        for k in range(1, h + 1):
            columns.append(series[h - k:n - k])
            labels.append(f"{channel}_lag{k}")
    if spec.include_current_covariates:
        for channel in spec.covariates:
            columns.append(frame.channel(channel)[h:])
            labels.append(f"{channel}_lag0")
    X = DesignMatrix(np.column_stack(columns), tuple(labels),
                     dates=frame.dates[h:])
    return LagMatrix(X=X, y=frame.channel(spec.target)[h:],
                     dates=frame.dates[h:])


def parse_lag_label(label: str) -> tuple[str, int]:
    """"close_lag3" -> ("close", 3)."""
    channel, _, depth = label.rpartition("_lag")
    return channel, int(depth)


def feedback_profile(frame: SeriesFrame, spec: LagSpec,
                     lam: float | None = None, standardize: bool = False,
                     tol: float = DEFAULT_TOL,
                     max_sweeps: int = DEFAULT_MAX_SWEEPS):
    """Per-lag L1 weights of the past on today's target.

    Fits the penalized regression of the target on the lag design and
    returns ((channel, lag, weight) rows ordered by lag then channel, fitted
    model). The sign of each weight reads as positive or negative feedback
    from that day.
    """
    lag_matrix = build_lag_matrix(frame, spec)
    model = LassoRegression(lam=lam, tol=tol, max_sweeps=max_sweeps,
                            standardize=standardize).fit(lag_matrix.X, lag_matrix.y)
    channel_rank = {name: i for i, name in enumerate(CHANNELS)}
    rows = []
    for label, weight in model.coefficients():
        channel, lag = parse_lag_label(label)
        rows.append((channel, lag, weight))
    rows.sort(key=lambda r: (r[1], channel_rank[r[0]]))
    return rows, model
