"""Shared test helpers: tiny frame builders and the brute-force grid oracle
for the L1 objective."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np
import pytest

from lagcast.timeseries import SeriesFrame


def weekdays(n: int, start: date = date(2020, 1, 6)) -> tuple[date, ...]:
    out = []
    current = start
    while len(out) < n:
        if current.weekday() < 5:
            out.append(current)
        current += timedelta(days=1)
    return tuple(out)


def frame_from_close(closes, instrument="test", volume=None) -> SeriesFrame:
    """Valid OHLCV frame around a given close path (opens = prior close)."""
    close = np.asarray(closes, dtype=float)
    n = close.shape[0]
    open_ = np.concatenate([[close[0]], close[:-1]])
    high = np.maximum(open_, close) * 1.001
    low = np.minimum(open_, close) * 0.999
    vol = np.full(n, 1000.0) if volume is None else np.asarray(volume, float)
    return SeriesFrame(instrument=instrument, dates=weekdays(n), open=open_,
                       high=high, low=low, close=close, volume=vol)


def lasso_objective_grid(X: np.ndarray, y: np.ndarray, lam: float,
                         grid: np.ndarray) -> np.ndarray:
    """Exact objective values over candidate coefficient rows, with the
    intercept profiled out analytically (optimal at mean(y) - b.mean(X))."""
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    resid = yc[None, :] - grid @ Xc.T
    return np.einsum("ij,ij->i", resid, resid) + lam * np.abs(grid).sum(axis=1)


def brute_force_lasso(X: np.ndarray, y: np.ndarray, lam: float,
                      span: float = 4.0, points: int = 81,
                      stages: int = 3) -> np.ndarray:
    """Dense grid minimization of the L1 objective for 1 or 2 features.

    Multi-stage refinement: each stage re-grids a +-2-step window around
    the previous argmin, ending well below 1e-3 resolution. Independent of
    the coordinate-descent solver: it only evaluates the objective.
    """
    p = X.shape[1]
    assert p in (1, 2), "oracle supports 1 or 2 features"
    center = np.zeros(p)
    half = span
    step = None
    for _ in range(stages):
        axes = [np.linspace(center[j] - half, center[j] + half, points)
                for j in range(p)]
        if p == 1:
            grid = axes[0][:, None]
        else:
            a, b = np.meshgrid(axes[0], axes[1], indexing="ij")
            grid = np.column_stack([a.ravel(), b.ravel()])
        values = lasso_objective_grid(X, y, lam, grid)
        center = grid[int(np.argmin(values))]
        step = 2.0 * half / (points - 1)
        half = 2.0 * step
    assert step < 1e-3
    return center


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
