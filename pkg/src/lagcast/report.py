"""Artifact rendering: CSV/JSON formatting rules and hand-built SVG charts.

Everything here is plain string assembly with fixed formatting, so a given
input always produces byte-identical output. Human-facing CSV summaries
carry 6 decimals; JSON floats use Python's shortest round-trip repr, which
is lossless (at most 17 significant digits).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .stats import CorrMatrix

CELL = 72
MARGIN = 96
CHANNEL_COLORS = {
    "open": "#1b9e77",
    "high": "#d95f02",
    "low": "#7570b3",
    "close": "#e7298a",
    "volume": "#66a61e",
}


def fmt6(x: float) -> str:
    return f"{float(x):.6f}"


def write_text(path, text: str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def write_json(path, payload) -> Path:
    return write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _ramp_color(value: float) -> str:
    """Linear two-sided ramp over [-1, 1]: blue, through white, to red."""
    v = max(-1.0, min(1.0, float(value)))
    white = (255, 255, 255)
    anchor = (178, 24, 43) if v >= 0 else (33, 102, 172)
    frac = abs(v)
    r, g, b = (round(w - frac * (w - a)) for w, a in zip(white, anchor))
    return f"rgb({r},{g},{b})"


def corr_heatmap_svg(corr: CorrMatrix) -> str:
    """Correlation heat map: one colored cell per pair, value printed to two
    decimals."""
    n = len(corr.labels)
    size = MARGIN + n * CELL + 12
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for i, label in enumerate(corr.labels):
        x = MARGIN + i * CELL + CELL // 2
        parts.append(
            f'<text x="{x}" y="{MARGIN - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{label}</text>'
        )
        y = MARGIN + i * CELL + CELL // 2 + 4
        parts.append(
            f'<text x="{MARGIN - 10}" y="{y}" text-anchor="end" '
            f'font-family="sans-serif" font-size="13">{label}</text>'
        )
    for i in range(n):
        for j in range(n):
            value = float(corr.values[i, j])
            x = MARGIN + j * CELL
            y = MARGIN + i * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{_ramp_color(value)}" stroke="#444" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{x + CELL // 2}" y="{y + CELL // 2 + 5}" '
                f'text-anchor="middle" font-family="sans-serif" '
                f'font-size="14">{value:.2f}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def profile_svg(rows: list[tuple[str, int, float]],
                title: str = "per-lag weights") -> str:
    """Lag-weight line chart, one polyline per channel, zero axis marked."""
    width, height = 960, 420
    pad_l, pad_r, pad_t, pad_b = 70, 150, 40, 50
    lags = sorted({lag for _, lag, _ in rows})
    weights = [w for _, _, w in rows]
    w_min = min(min(weights), 0.0)
    w_max = max(max(weights), 0.0)
    span = (w_max - w_min) or 1.0
    lag_span = (max(lags) - min(lags)) or 1

    def sx(lag: float) -> float:
        return pad_l + (lag - min(lags)) / lag_span * (width - pad_l - pad_r)

    def sy(w: float) -> float:
        return pad_t + (w_max - w) / span * (height - pad_t - pad_b)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{pad_l}" y1="{sy(0.0):.2f}" x2="{width - pad_r}" '
        f'y2="{sy(0.0):.2f}" stroke="#999" stroke-dasharray="4 3"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" '
        f'y2="{height - pad_b}" stroke="#222"/>',
        f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" '
        f'y2="{height - pad_b}" stroke="#222"/>',
        f'<text x="{width // 2}" y="{height - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">lag (trading days)</text>',
        f'<text x="20" y="{height // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 20 {height // 2})">weight</text>',
    ]
    channels = []
    for channel, _, _ in rows:
        if channel not in channels:
            channels.append(channel)
    for idx, channel in enumerate(channels):
        pts = sorted((lag, w) for c, lag, w in rows if c == channel)
        color = CHANNEL_COLORS.get(channel, "#333333")
        points = " ".join(f"{sx(lag):.2f},{sy(w):.2f}" for lag, w in pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
        ly = pad_t + 18 * idx
        parts.append(
            f'<rect x="{width - pad_r + 12}" y="{ly - 9}" width="12" '
            f'height="12" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{width - pad_r + 30}" y="{ly + 2}" '
            f'font-family="sans-serif" font-size="12">{channel}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def influence_csv(pairs: list[tuple[str, float]]) -> str:
    lines = ["label,weight"]
    lines += [f"{label},{fmt6(weight)}" for label, weight in pairs]
    return "\n".join(lines) + "\n"


def profile_csv(rows: list[tuple[str, int, float]]) -> str:
    lines = ["channel,lag,weight"]
    lines += [f"{channel},{lag},{fmt6(w)}" for channel, lag, w in rows]
    return "\n".join(lines) + "\n"


def predictions_csv(dates, actual, predicted) -> str:
    lines = ["date,actual,predicted"]
    for d, a, p in zip(dates, np.asarray(actual), np.asarray(predicted)):
        lines.append(f"{d.isoformat()},{fmt6(a)},{fmt6(p)}")
    return "\n".join(lines) + "\n"
