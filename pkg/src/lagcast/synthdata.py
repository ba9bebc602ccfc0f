"""Seeded synthetic series: the ground-truth oracles for the statistical
claims the real market data cannot verify at desk scale.

The random source is a fully specified xorshift64* generator (seeded
through one splitmix64 step, uniforms from the top 53 bits, normals by
Box-Muller) so any reimplementation can reproduce the exact streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .errors import ConfigError
from .pca import jacobi_eigh
from .timeseries import AlignedPanel, SeriesFrame

MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_CALENDAR_EPOCH = date(2015, 1, 2)


def _splitmix64(x: int) -> int:
    z = (x + _SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class Xorshift64Star:
    """Marsaglia xorshift64* with a splitmix64-derived starting state."""

    _MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self._state = _splitmix64(seed & MASK64)
        if self._state == 0:
            self._state = _SPLITMIX_GAMMA
        self._spare_normal: float | None = None

    def next_uint64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * self._MULT) & MASK64

    def uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_uint64() >> 11) * 2.0 ** -53

    def normal(self) -> float:
        """Standard normal via Box-Muller (the sine mate is cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1]: keeps the log finite
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)])

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


def trading_dates(n: int, start: date = _CALENDAR_EPOCH) -> tuple[date, ...]:
    """n consecutive weekdays beginning at ``start``."""
    out = []
    current = start
    while len(out) < n:
        if current.weekday() < 5:
            out.append(current)
        current += timedelta(days=1)
    return tuple(out)


@dataclass(frozen=True)
class GeneratorSpec:
    """What to synthesize. Unused fields for a given kind are ignored.

    kinds:
      white_noise      -- close = base + scale * iid normals
      ar_process       -- close = base + stationary AR(len(ar_coefficients))
      correlated_panel -- panel whose sample correlation approaches
                          ``corr_target`` as length grows
      latent_factor    -- OHLCV frame whose open/close/volume channels are
                          combinations of ``factor_count`` deterministic
                          time functions (a trend plus harmonics) with iid
                          measurement noise, so the centered lag design is
                          exactly that rank plus noise
    """

    kind: str
    length: int
    seed: int = 0
    instrument: str = "synthetic"
    ar_coefficients: tuple[float, ...] = ()
    noise_scale: float = 1.0
    base_price: float = 100.0
    corr_target: tuple[tuple[float, ...], ...] | None = None
    labels: tuple[str, ...] | None = None
    factor_count: int = 3
    factor_swing: float = 10.0
    loadings: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        kinds = ("white_noise", "ar_process", "correlated_panel", "latent_factor")
        if self.kind not in kinds:
            raise ConfigError(f"unknown generator kind '{self.kind}' "
                              f"(choose from {kinds})")
        if self.length < 2:
            raise ConfigError(f"length must be >= 2, got {self.length}")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be >= 0")
        if self.kind == "ar_process":
            if not self.ar_coefficients:
                raise ConfigError("ar_process needs ar_coefficients")
            _check_stationary(self.ar_coefficients)
        if self.kind == "correlated_panel":
            if self.corr_target is None:
                raise ConfigError("correlated_panel needs corr_target")
        if self.kind == "latent_factor":
            if self.factor_count < 1:
                raise ConfigError("factor_count must be >= 1")
            if self.factor_swing <= 0:
                raise ConfigError("factor_swing must be > 0")


def _check_stationary(phi: tuple[float, ...]) -> None:
    """Companion-matrix spectral radius must be < 1."""
    roots = np.roots([1.0] + [-p for p in phi])
    radius = float(np.max(np.abs(roots))) if roots.size else 0.0
    if radius >= 1.0:
        raise ConfigError(
            f"AR coefficients {phi} are non-stationary "
            f"(companion spectral radius {radius:.4f} >= 1)"
        )


def _ar_path(rng: Xorshift64Star, phi: tuple[float, ...], n: int,
             sigma: float) -> np.ndarray:
    p = len(phi)
    burn = 200 + 10 * p
    phi_arr = np.asarray(phi)[::-1]
    x = np.zeros(burn + n)
    for t in range(p, burn + n):
        x[t] = float(phi_arr @ x[t - p:t]) + sigma * rng.normal()
    return x[burn:]


def ohlcv_from_close(close_path: np.ndarray, rng: Xorshift64Star,
                     instrument: str, dates: tuple[date, ...] | None = None,
                     ) -> SeriesFrame:
    """Wrap a close path in invariant-safe OHLCV rows.

    The path is shifted (affinely, preserving all correlations) so every
    price stays positive; opens carry the prior close and high/low bracket
    them with small seeded jitter.
    """
    n = close_path.shape[0]
    low_point = float(np.min(close_path))
    close = close_path + (1.0 - low_point if low_point < 1.0 else 0.0)
    open_ = np.empty(n)
    open_[0] = close[0]
    open_[1:] = close[:-1]
    high = np.empty(n)
    low = np.empty(n)
    volume = np.empty(n)
    for t in range(n):
        top = max(open_[t], close[t])
        bottom = min(open_[t], close[t])
        high[t] = top * (1.0 + 0.002 * rng.uniform())
        low[t] = bottom * (1.0 - 0.002 * rng.uniform())
        volume[t] = float(math.floor(1e5 * (1.0 + rng.uniform())))
    return SeriesFrame(
        instrument=instrument,
        dates=dates if dates is not None else trading_dates(n),
        open=open_, high=high, low=low, close=close, volume=volume,
    )


def _psd_mixing_matrix(corr: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD correlation target."""
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise ConfigError(f"corr_target must be square, got shape {corr.shape}")
    if float(np.max(np.abs(corr - corr.T))) > 1e-10:
        raise ConfigError("corr_target must be symmetric")
    evals, vecs = jacobi_eigh(corr)
    if float(np.min(evals)) < -1e-8:
        raise ConfigError(
            f"corr_target is not positive semidefinite "
            f"(eigenvalue {float(np.min(evals)):.3e})"
        )
    return vecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ vecs.T


def _generate_panel(spec: GeneratorSpec) -> AlignedPanel:
    corr = np.asarray(spec.corr_target, dtype=float)
    mixing = _psd_mixing_matrix(corr)
    p = corr.shape[0]
    labels = spec.labels or tuple(f"s{i + 1}" for i in range(p))
    if len(labels) != p:
        raise ConfigError(f"{len(labels)} labels for {p} panel columns")
    rng = Xorshift64Star(spec.seed)
    z = np.array([[rng.normal() for _ in range(p)] for _ in range(spec.length)])
    values = spec.base_price + spec.noise_scale * (z @ mixing)
    dates = trading_dates(spec.length)
    return AlignedPanel(dates=dates,
                        columns={lab: values[:, j] for j, lab in enumerate(labels)})


def _default_loadings(rng: Xorshift64Star, r: int) -> np.ndarray:
    # three channel rows (open, close, volume), kept away from zero so the
    # channels stay genuinely distinct combinations
    out = np.empty((3, r))
    for i in range(3):
        for j in range(r):
            magnitude = 0.5 + rng.uniform()
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            out[i, j] = sign * magnitude
    return out


def factor_paths(n: int, r: int) -> np.ndarray:
    """r deterministic unit-amplitude time functions whose lags stay inside
    their own r-dimensional span (each harmonic pair is closed under time
    shifts, and so is the day-parity alternation used when r is odd). That
    shift closure is what makes them exact latent factors for a lag
    design: the centered design matrix has rank r plus noise, no matter
    the depth."""
    periods = (61.0, 23.0, 11.0, 7.0)
    t = np.arange(n, dtype=float)
    columns: list[np.ndarray] = []
    h = 0
    while len(columns) + 1 < r:
        period = periods[h % len(periods)] * (1.0 + h // len(periods))
        columns.append(np.cos(2.0 * np.pi * t / period))
        columns.append(np.sin(2.0 * np.pi * t / period))
        h += 1
    if len(columns) < r:  # odd r: the +1/-1 alternation spans one dimension
        columns.append(np.where(np.arange(n) % 2 == 0, 1.0, -1.0))
    return np.column_stack(columns[:r])


def _generate_latent_factor(spec: GeneratorSpec) -> SeriesFrame:
    rng = Xorshift64Star(spec.seed)
    r, n = spec.factor_count, spec.length
    if spec.loadings is not None:
        loadings = np.asarray(spec.loadings, dtype=float)
        if loadings.shape != (3, r):
            raise ConfigError(
                f"loadings must be 3 rows (open, close, volume) x "
                f"{r} factors, got {loadings.shape}"
            )
    else:
        loadings = _default_loadings(rng, r)
    factors = spec.factor_swing * factor_paths(n, r)
    noise = spec.noise_scale
    open_raw = spec.base_price + factors @ loadings[0] + noise * rng.normals(n)
    close_raw = spec.base_price + factors @ loadings[1] + noise * rng.normals(n)
    vol_swing = factors @ loadings[2]
    vol_noise = noise * rng.normals(n)

    floor_price = min(float(np.min(open_raw)), float(np.min(close_raw)))
    shift = 1.0 - floor_price if floor_price < 1.0 else 0.0
    open_ = open_raw + shift
    close = close_raw + shift
    high = np.empty(n)
    low = np.empty(n)
    for t in range(n):
        high[t] = max(open_[t], close[t]) * (1.0 + 0.002 * rng.uniform())
        low[t] = min(open_[t], close[t]) * (1.0 - 0.002 * rng.uniform())
    swing_floor = float(np.min(vol_swing))
    volume = 50_000.0 + 100.0 * (vol_swing - swing_floor) + vol_noise
    return SeriesFrame(
        instrument=spec.instrument, dates=trading_dates(n),
        open=open_, high=high, low=low, close=close, volume=volume,
    )


def generate(spec: GeneratorSpec):
    """Synthesize the series or panel described by ``spec``.

    Deterministic for a fixed spec, bit for bit.
    """
    if spec.kind == "white_noise":
        rng = Xorshift64Star(spec.seed)
        path = spec.base_price + spec.noise_scale * rng.normals(spec.length)
        return ohlcv_from_close(path, rng, spec.instrument)
    if spec.kind == "ar_process":
        rng = Xorshift64Star(spec.seed)
        path = spec.base_price + _ar_path(rng, spec.ar_coefficients,
                                          spec.length, spec.noise_scale)
        return ohlcv_from_close(path, rng, spec.instrument)
    if spec.kind == "correlated_panel":
        return _generate_panel(spec)
    return _generate_latent_factor(spec)


def panel_frames(panel: AlignedPanel, seed: int) -> list[SeriesFrame]:
    """Wrap each panel column in an OHLCV frame (for writing panel kinds in
    the ingestion format)."""
    frames = []
    for offset, (label, values) in enumerate(panel.columns.items()):
        rng = Xorshift64Star(seed + 1 + offset)
        frames.append(ohlcv_from_close(np.asarray(values), rng, label,
                                       dates=panel.dates))
    return frames
