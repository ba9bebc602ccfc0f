"""Command-line entry point.

Subcommands: correlate, influence, lags, profile, sweep, generate. Flags
override config-file values; the config file is optional for the simple
subcommands. Exit codes: 0 success, 1 usage/validation/config errors
(single line prefixed "error:"), 2 internal failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from datetime import date
from pathlib import Path

from .errors import ConfigError, LagcastError
from .lagfeatures import build_lag_matrix, node_count
from .pipeline import (ExperimentConfig, PRESETS, apply_preset, run_feedback_profile,
                       run_influence, run_pca_sweep, _load_frames, _manifest,
                       _target_frame)
from .report import corr_heatmap_svg, write_json, write_text
from .stats import correlation_matrix, log_returns
from .synthdata import GeneratorSpec, generate, panel_frames
from .timeseries import AlignedPanel, align_inner

OUTPUT_DIR_ENV = "LAGCAST_OUTPUT_DIR"


def _add_io_arguments(sub: argparse.ArgumentParser, n_files: str) -> None:
    sub.add_argument("files", nargs=n_files, help="instrument OHLCV CSV files")
    sub.add_argument("--labels", help="comma-separated instrument labels "
                                      "(default: file stems)")
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--out", "-o", help=f"output directory (default: "
                                         f"${OUTPUT_DIR_ENV} or ./out)")
    sub.add_argument("--target", help="target instrument label")
    sub.add_argument("--start", help="first date to keep (YYYY-MM-DD)")
    sub.add_argument("--end", help="last date to keep (YYYY-MM-DD)")
    sub.add_argument("--verbose", "-v", action="store_true")


def _add_lasso_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lambda", dest="lam", type=float,
                     help="L1 penalty (default: chronological validation pick)")
    sub.add_argument("--tol", type=float, help="coordinate-descent tolerance")
    sub.add_argument("--max-sweeps", type=int)
    sub.add_argument("--standardize", action=argparse.BooleanOptionalAction,
                     default=None, help="fit on unit-variance columns")


def _add_lag_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--history", type=int, help="lag depth in trading days")
    sub.add_argument("--lag-channels", help="comma-separated channels to lag")
    sub.add_argument("--covariates", action=argparse.BooleanOptionalAction,
                     default=None, help="add same-day open/high/low/volume columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagcast",
        description="Cross-asset influence analysis and lag-feature forecasting.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    correlate = commands.add_parser(
        "correlate", help="pairwise correlation matrix and heat map")
    _add_io_arguments(correlate, "+")
    correlate.add_argument("--channel", help="price channel (default close)")
    correlate.add_argument("--log-returns", action=argparse.BooleanOptionalAction,
                           default=None, help="correlate log returns, not levels")

    influence = commands.add_parser(
        "influence", help="correlations plus L1 influence weights on a target")
    _add_io_arguments(influence, "+")
    influence.add_argument("--channel")
    influence.add_argument("--log-returns", action=argparse.BooleanOptionalAction,
                           default=None)
    _add_lasso_arguments(influence)

    lags = commands.add_parser("lags", help="emit the lag design matrix as CSV")
    _add_io_arguments(lags, "+")
    _add_lag_arguments(lags)

    profile = commands.add_parser(
        "profile", help="per-lag feedback weights of the past on today's close")
    _add_io_arguments(profile, "+")
    _add_lag_arguments(profile)
    _add_lasso_arguments(profile)

    sweep = commands.add_parser(
        "sweep", help="PCA component sweep with linear-regression scoring")
    _add_io_arguments(sweep, "*")
    _add_lag_arguments(sweep)
    _add_lasso_arguments(sweep)
    sweep.add_argument("--kmin", type=int)
    sweep.add_argument("--kmax", type=int)
    sweep.add_argument("--step", type=int)
    sweep.add_argument("--train-frac", type=float)
    sweep.add_argument("--pca-scaling", choices=("covariance", "correlation"))
    sweep.add_argument("--preset", choices=PRESETS)

    gen = commands.add_parser("generate", help="write seeded synthetic data")
    gen.add_argument("--kind", required=True,
                     choices=("ar", "white", "panel", "factors"))
    gen.add_argument("--n", type=int, required=True, help="series length")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--phi", help="comma-separated AR coefficients")
    gen.add_argument("--noise", type=float, default=1.0)
    gen.add_argument("--base", type=float, default=100.0)
    gen.add_argument("--corr", type=float,
                     help="pairwise correlation for a 2-column panel")
    gen.add_argument("--factors", type=int, default=3)
    gen.add_argument("--instrument", help="output label (default: the kind)")
    gen.add_argument("--out", "-o")
    gen.add_argument("--verbose", "-v", action="store_true")
    return parser


def _parse_date_flag(value: str | None, name: str) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise ConfigError(f"--{name} must be YYYY-MM-DD, got '{value}'") from None


def _default_outdir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "out")


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    config = ExperimentConfig.from_dict(raw)

    overrides: dict = {}
    files = getattr(args, "files", None)
    if files:
        labels = None
        if getattr(args, "labels", None):
            labels = [l.strip() for l in args.labels.split(",")]
            if len(labels) != len(files):
                raise ConfigError(
                    f"{len(labels)} labels for {len(files)} files"
                )
        overrides["inputs"] = tuple(
            (f, labels[i] if labels else Path(f).stem)
            for i, f in enumerate(files)
        )
    if getattr(args, "target", None) is not None:
        overrides["target"] = args.target
    overrides["start"] = _parse_date_flag(getattr(args, "start", None), "start") \
        or config.start
    overrides["end"] = _parse_date_flag(getattr(args, "end", None), "end") \
        or config.end
    flag_map = {
        "channel": "channel", "log_returns": "use_log_returns",
        "lam": "lam", "tol": "tolerance", "max_sweeps": "max_sweeps",
        "standardize": "standardize", "history": "history_points",
        "covariates": "include_current_covariates", "kmin": "k_min",
        "kmax": "k_max", "step": "k_step", "train_frac": "train_fraction",
        "pca_scaling": "pca_scaling", "seed": "seed",
    }
    for flag, field_name in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "lag_channels", None):
        overrides["lag_channels"] = tuple(
            c.strip() for c in args.lag_channels.split(",")
        )
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    elif "output_dir" not in raw:
        overrides["output_dir"] = _default_outdir()
    return replace(config, **overrides)


def _echo(args: argparse.Namespace, message: str) -> None:
    if getattr(args, "verbose", False):
        print(message, file=sys.stderr)


def _cmd_correlate(args: argparse.Namespace) -> None:
    config = _build_config(args)
    frames = _load_frames(config)
    if len(frames) < 2:
        raise ConfigError("correlate needs at least 2 input files")
    panel = align_inner(frames, config.channel)
    if config.use_log_returns:
        panel = log_returns(panel)
    corr = correlation_matrix(panel)
    out = Path(config.output_dir)
    write_text(out / "corr_matrix.csv", corr.to_csv())
    write_text(out / "corr_heatmap.svg", corr_heatmap_svg(corr))
    write_json(out / "run_manifest.json", _manifest(config, {
        "experiment": "correlate",
        "n_rows": len(panel),
        "date_range": [panel.dates[0].isoformat(), panel.dates[-1].isoformat()],
        "instruments": list(panel.labels),
    }))
    _echo(args, f"wrote {out / 'corr_matrix.csv'} and {out / 'corr_heatmap.svg'}")


def _cmd_influence(args: argparse.Namespace) -> None:
    config = _build_config(args)
    report = run_influence(config)
    _echo(args, f"lambda={report.model.lambda_} over {report.n_rows} rows")


def _cmd_lags(args: argparse.Namespace) -> None:
    config = _build_config(args)
    frame = _target_frame(config)
    lag = build_lag_matrix(frame, config.lag_spec)
    out = Path(config.output_dir)
    write_text(out / "lag_matrix.csv", lag.to_csv())
    write_json(out / "run_manifest.json", _manifest(config, {
        "experiment": "lags",
        "instrument": frame.instrument,
        "n_rows": lag.n_rows,
        "node_count": node_count(config.lag_spec),
    }))
    _echo(args, f"wrote {out / 'lag_matrix.csv'} ({lag.n_rows} rows)")


def _cmd_profile(args: argparse.Namespace) -> None:
    config = _build_config(args)
    report = run_feedback_profile(config)
    _echo(args, f"sign summary: {report.sign_summary}")


def _cmd_sweep(args: argparse.Namespace) -> None:
    config = _build_config(args)
    if getattr(args, "preset", None):
        config = apply_preset(config, args.preset)
    result = run_pca_sweep(config)
    _echo(args, f"chosen k={result.chosen_k}")


def _generator_spec(args: argparse.Namespace) -> GeneratorSpec:
    kind_map = {"ar": "ar_process", "white": "white_noise",
                "panel": "correlated_panel", "factors": "latent_factor"}
    kind = kind_map[args.kind]
    instrument = args.instrument or args.kind
    phi: tuple[float, ...] = ()
    if args.phi:
        try:
            phi = tuple(float(v) for v in args.phi.split(","))
        except ValueError:
            raise ConfigError(f"--phi must be comma-separated floats, "
                              f"got '{args.phi}'") from None
    corr_target = None
    if kind == "correlated_panel":
        if args.corr is None:
            raise ConfigError("--corr is required for --kind panel")
        corr_target = ((1.0, args.corr), (args.corr, 1.0))
    return GeneratorSpec(
        kind=kind, length=args.n, seed=args.seed, instrument=instrument,
        ar_coefficients=phi, noise_scale=args.noise, base_price=args.base,
        corr_target=corr_target, factor_count=args.factors,
    )


def _cmd_generate(args: argparse.Namespace) -> None:
    spec = _generator_spec(args)
    out = Path(args.out or _default_outdir())
    data = generate(spec)
    written: list[str] = []
    if isinstance(data, AlignedPanel):
        for frame in panel_frames(data, spec.seed):
            path = write_text(out / f"{frame.instrument}.csv", frame.to_csv())
            written.append(path.name)
    else:
        path = write_text(out / f"{data.instrument}.csv", data.to_csv())
        written.append(path.name)
    write_json(out / "run_manifest.json", {
        "experiment": "generate",
        "kind": spec.kind,
        "length": spec.length,
        "seed": spec.seed,
        "noise_scale": spec.noise_scale,
        "base_price": spec.base_price,
        "ar_coefficients": list(spec.ar_coefficients),
        "files": written,
    })
    _echo(args, f"wrote {', '.join(written)} in {out}")


_HANDLERS = {
    "correlate": _cmd_correlate,
    "influence": _cmd_influence,
    "lags": _cmd_lags,
    "profile": _cmd_profile,
    "sweep": _cmd_sweep,
    "generate": _cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        _HANDLERS[args.command](args)
    except LagcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - contract: internal failure -> 2
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
