"""End-to-end experiment runs: cross-asset influence, per-lag feedback
profile, and the PCA component sweep.

Each run reads instrument CSVs named in the config, writes its artifacts
under the configured output directory, and returns the in-memory result.
Runs are deterministic: identical config plus identical input files yield
byte-identical artifacts.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, InputError
from .lagfeatures import LagMatrix, LagSpec, build_lag_matrix, feedback_profile, node_count
from .lasso import LassoRegression, influence_weights
from .pca import PrincipalComponents
from .regress import LeastSquares, MetricsReport, metrics
from .report import (corr_heatmap_svg, fmt6, influence_csv, predictions_csv,
                     profile_csv, profile_svg, write_json, write_text)
from .stats import CorrMatrix, correlation_matrix, log_returns
from .timeseries import SeriesFrame, align_inner, chronological_split, read_ohlcv_csv

PCA_SCALING_MODES = ("covariance", "correlation")
PRESETS = ("deep-history",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; serializes one-to-one with the JSON config
    file and the CLI flags."""

    inputs: tuple[tuple[str, str], ...] = ()  # (path, label) pairs
    target: str | None = None
    start: date | None = None
    end: date | None = None
    channel: str = "close"
    use_log_returns: bool = False
    history_points: int = 100
    lag_channels: tuple[str, ...] = ("open", "high", "low", "close")
    include_current_covariates: bool = True
    lam: float | None = None
    tolerance: float = 1e-7
    max_sweeps: int = 10_000
    standardize: bool = False
    k_min: int = 5
    k_max: int = 105
    k_step: int = 5
    train_fraction: float = 0.8
    pca_scaling: str = "covariance"
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "inputs",
                           tuple((str(p), str(l)) for p, l in self.inputs))
        object.__setattr__(self, "lag_channels", tuple(self.lag_channels))
        if self.k_min < 1:
            raise ConfigError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_min > self.k_max:
            raise ConfigError(f"k_min={self.k_min} exceeds k_max={self.k_max}")
        if self.k_step < 1:
            raise ConfigError(f"k_step must be >= 1, got {self.k_step}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )
        if self.pca_scaling not in PCA_SCALING_MODES:
            raise ConfigError(
                f"pca_scaling must be one of {PCA_SCALING_MODES}, "
                f"got '{self.pca_scaling}'"
            )
        if self.lam is not None and self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")

    @property
    def lag_spec(self) -> LagSpec:
        return LagSpec(
            channels=self.lag_channels,
            history_points=self.history_points,
            include_current_covariates=self.include_current_covariates,
        )

    def to_dict(self) -> dict:
        return {
            "inputs": [{"path": p, "label": l} for p, l in self.inputs],
            "target": self.target,
            "start": self.start.isoformat() if self.start else None,
            "end": self.end.isoformat() if self.end else None,
            "channel": self.channel,
            "log_returns": self.use_log_returns,
            "history_points": self.history_points,
            "lag_channels": list(self.lag_channels),
            "include_current_covariates": self.include_current_covariates,
            "lambda": self.lam,
            "tolerance": self.tolerance,
            "max_sweeps": self.max_sweeps,
            "standardize": self.standardize,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "k_step": self.k_step,
            "train_fraction": self.train_fraction,
            "pca_scaling": self.pca_scaling,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {
            "inputs", "target", "start", "end", "channel", "log_returns",
            "history_points", "lag_channels", "include_current_covariates",
            "lambda", "tolerance", "max_sweeps", "standardize", "k_min",
            "k_max", "k_step", "train_fraction", "pca_scaling", "output_dir",
            "seed",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        kwargs: dict = {}
        if "inputs" in raw:
            kwargs["inputs"] = tuple(
                (entry["path"], entry.get("label") or Path(entry["path"]).stem)
                for entry in raw["inputs"]
            )
        for src, dst in (("log_returns", "use_log_returns"), ("lambda", "lam")):
            if src in raw:
                kwargs[dst] = raw[src]
        for key in ("target", "channel", "history_points", "lag_channels",
                    "include_current_covariates", "tolerance", "max_sweeps",
                    "standardize", "k_min", "k_max", "k_step",
                    "train_fraction", "pca_scaling", "output_dir", "seed"):
            if key in raw:
                kwargs[key] = raw[key]
        for key in ("start", "end"):
            if raw.get(key) is not None:
                kwargs[key] = date.fromisoformat(raw[key])
        if "lag_channels" in kwargs:
            kwargs["lag_channels"] = tuple(kwargs["lag_channels"])
        return cls(**kwargs)


def apply_preset(config: ExperimentConfig, preset: str) -> ExperimentConfig:
    """Named experiment presets. "deep-history" is the full-depth variant:
    four price channels at 100 history points with same-day covariates, the
    component sweep raised to every available node."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset '{preset}' (choose from {PRESETS})")
    spec = LagSpec(channels=("open", "high", "low", "close"),
                   history_points=100, include_current_covariates=True)
    return replace(
        config,
        lag_channels=spec.channels,
        history_points=spec.history_points,
        include_current_covariates=True,
        k_min=5,
        k_max=node_count(spec),
        k_step=5,
    )


def _load_frames(config: ExperimentConfig) -> list[SeriesFrame]:
    if not config.inputs:
        raise ConfigError("no input files configured")
    frames = []
    for path, label in config.inputs:
        frame = read_ohlcv_csv(path, label)
        if config.start or config.end:
            frame = frame.restrict(config.start, config.end)
        frames.append(frame)
    return frames


def _target_frame(config: ExperimentConfig) -> SeriesFrame:
    frames = _load_frames(config)
    if config.target is not None:
        for frame in frames:
            if frame.instrument == config.target:
                return frame
        raise ConfigError(
            f"target '{config.target}' not among inputs "
            f"{[f.instrument for f in frames]}"
        )
    if len(frames) != 1:
        raise ConfigError("multiple inputs need an explicit target label")
    return frames[0]


def _versions() -> dict:
    return {
        "lagcast": __version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
        "numpy": np.__version__,
    }


def _manifest(config: ExperimentConfig, body: dict) -> dict:
    return {"config": config.to_dict(), "versions": _versions(), **body}


@dataclass(frozen=True)
class InfluenceReport:
    corr: CorrMatrix
    model: LassoRegression
    target: str
    n_rows: int
    date_range: tuple[date, date]


def run_influence(config: ExperimentConfig) -> InfluenceReport:
    """Correlation matrix plus L1 influence weights of every other
    instrument on the target."""
    if config.target is None:
        raise ConfigError("influence run needs a target label")
    frames = _load_frames(config)
    if len(frames) < 2:
        raise ConfigError("influence run needs at least 2 instruments")
    panel = align_inner(frames, config.channel)
    if config.use_log_returns:
        panel = log_returns(panel)
    corr = correlation_matrix(panel)
    model = influence_weights(
        panel, config.target, lam=config.lam,
        standardize=config.standardize, tol=config.tolerance,
        max_sweeps=config.max_sweeps,
    )
    out = Path(config.output_dir)
    write_text(out / "corr_matrix.csv", corr.to_csv())
    write_text(out / "corr_heatmap.svg", corr_heatmap_svg(corr))
    write_text(out / "influence_weights.csv", influence_csv(model.coefficients()))
    write_json(out / "influence_weights.json", model.to_dict())
    report = InfluenceReport(
        corr=corr, model=model, target=config.target, n_rows=len(panel),
        date_range=(panel.dates[0], panel.dates[-1]),
    )
    write_json(out / "run_manifest.json", _manifest(config, {
        "experiment": "influence",
        "lambda_used": model.lambda_,
        "standardize": config.standardize,
        "log_returns": config.use_log_returns,
        "date_range": [report.date_range[0].isoformat(),
                       report.date_range[1].isoformat()],
        "n_rows": report.n_rows,
        "instruments": list(panel.labels),
    }))
    return report


@dataclass(frozen=True)
class FeedbackReport:
    rows: tuple[tuple[str, int, float], ...]
    model: LassoRegression
    sign_summary: dict
    n_rows: int


def run_feedback_profile(config: ExperimentConfig) -> FeedbackReport:
    """Per-lag weight profile of the target's own past on today's close."""
    frame = _target_frame(config)
    spec = config.lag_spec
    if len(frame) <= spec.history_points + 10:
        raise InputError(
            f"{frame.instrument}: need more than {spec.history_points + 10} "
            f"rows for a {spec.history_points}-lag profile, got {len(frame)}"
        )
    rows, model = feedback_profile(
        frame, spec, lam=config.lam, standardize=config.standardize,
        tol=config.tolerance, max_sweeps=config.max_sweeps,
    )
    lag_weights = [w for _, lag, w in rows if lag >= 1]
    summary = {
        "positive": sum(1 for w in lag_weights if w > 0),
        "negative": sum(1 for w in lag_weights if w < 0),
        "zero": sum(1 for w in lag_weights if w == 0),
    }
    out = Path(config.output_dir)
    write_text(out / "feedback_profile.csv", profile_csv(rows))
    write_text(out / "feedback_profile.svg",
               profile_svg(rows, title=f"{frame.instrument}: per-lag weights"))
    n_rows = len(frame) - spec.history_points
    write_json(out / "run_manifest.json", _manifest(config, {
        "experiment": "feedback_profile",
        "lambda_used": model.lambda_,
        "standardize": config.standardize,
        "instrument": frame.instrument,
        "n_rows": n_rows,
        "node_count": node_count(spec),
        "sign_summary": summary,
    }))
    return FeedbackReport(rows=tuple(rows), model=model,
                          sign_summary=summary, n_rows=n_rows)


@dataclass(frozen=True)
class SweepRecord:
    k: int
    train: MetricsReport
    test: MetricsReport
    evr_sum: float


@dataclass(frozen=True)
class SweepResult:
    records: tuple[SweepRecord, ...]
    chosen_k: int
    basis_hash: str
    test_dates: tuple[date, ...] = field(repr=False, default=())
    test_actual: tuple[float, ...] = field(repr=False, default=())
    test_predicted: tuple[float, ...] = field(repr=False, default=())

    def record(self, k: int) -> SweepRecord:
        for rec in self.records:
            if rec.k == k:
                return rec
        raise KeyError(k)


def sweep_ks(config: ExperimentConfig, max_k: int) -> list[int]:
    if config.k_max > max_k:
        raise ConfigError(
            f"k_max={config.k_max} exceeds the {max_k} available components"
        )
    return list(range(config.k_min, config.k_max + 1, config.k_step))


def run_pca_sweep(config: ExperimentConfig) -> SweepResult:
    """Compress the lag design to k components, regress, and score both
    partitions for every k in the configured range.

    The basis (centering, scaling, eigenvectors) comes from the training
    partition only; test rows are projected through it untouched. One
    full-width training fit serves every k, since the leading k
    eigenvectors do not depend on how many are retained.
    """
    frame = _target_frame(config)
    spec = config.lag_spec
    lag = build_lag_matrix(frame, spec)
    train, test = chronological_split(lag, config.train_fraction)
    p = node_count(spec)
    ks = sweep_ks(config, p)
    k_top = max(ks)
    if train.n_rows < k_top + 2:
        raise ConfigError(
            f"k_max={k_top} needs at least {k_top + 2} training rows, "
            f"got {train.n_rows}"
        )
    basis = PrincipalComponents(
        n_components=k_top, scale=config.pca_scaling == "correlation"
    ).fit(train.X)
    train_scores = basis.transform(train.X)
    test_scores = basis.transform(test.X)
    ratios = basis.all_eigenvalues_ / basis.total_variance_

    records = []
    best_k, best_mse, best_model = None, None, None
    for k in ks:
        model = LeastSquares().fit(train_scores[:, :k], train.y)
        train_metrics = metrics(train.y, model.predict(train_scores[:, :k]))
        test_metrics = metrics(test.y, model.predict(test_scores[:, :k]))
        records.append(SweepRecord(
            k=k, train=train_metrics, test=test_metrics,
            evr_sum=float(np.sum(ratios[:k])),
        ))
        if best_mse is None or test_metrics.mse < best_mse:
            best_k, best_mse, best_model = k, test_metrics.mse, model
    predicted = best_model.predict(test_scores[:, :best_k])
    result = SweepResult(
        records=tuple(records), chosen_k=best_k, basis_hash=basis.basis_hash(),
        test_dates=test.dates, test_actual=tuple(float(v) for v in test.y),
        test_predicted=tuple(float(v) for v in predicted),
    )
    _write_sweep(config, frame, lag, train, result)
    return result


def _write_sweep(config: ExperimentConfig, frame: SeriesFrame, lag: LagMatrix,
                 train: LagMatrix, result: SweepResult) -> None:
    out = Path(config.output_dir)
    lines = ["k,train_mse,test_mse,train_r2,test_r2,evr_sum"]
    for rec in result.records:
        lines.append(",".join([
            str(rec.k), fmt6(rec.train.mse), fmt6(rec.test.mse),
            fmt6(rec.train.r2), fmt6(rec.test.r2), fmt6(rec.evr_sum),
        ]))
    write_text(out / "sweep.csv", "\n".join(lines) + "\n")
    write_text(out / f"predictions_k{result.chosen_k}.csv",
               predictions_csv(result.test_dates, result.test_actual,
                               result.test_predicted))
    write_json(out / "run_manifest.json", _manifest(config, {
        "experiment": "pca_sweep",
        "instrument": frame.instrument,
        "n_rows": lag.n_rows,
        "n_train_rows": train.n_rows,
        "node_count": node_count(config.lag_spec),
        "chosen_k": result.chosen_k,
        "basis_hash": result.basis_hash,
        "pca_scaling": config.pca_scaling,
    }))
