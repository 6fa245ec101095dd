"""Minimal self-contained SVG emission: line plots and histograms.

Direct geometric drawing (polylines, rectangles, axis ticks) with no
external renderer, so plots work anywhere the artifacts land.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

COLORS = ("#444444", "#d62728", "#1f77b4", "#2ca02c", "#9467bd")
MARGIN = 46
WIDTH = 860
HEIGHT = 300


def _axes(x0, y0, x1, y1, xlab, ylab, title) -> list[str]:
    parts = [
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.0f}" y="16" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{title}</text>',
    ]
    for frac, value in ((0.0, xlab[0]), (1.0, xlab[1])):
        x = x0 + frac * (x1 - x0)
        parts.append(
            f'<text x="{x:.1f}" y="{y1 + 16}" text-anchor="middle" '
            f'font-size="10" font-family="sans-serif">{value:.4g}</text>'
        )
    for frac, value in ((0.0, ylab[0]), (1.0, ylab[1])):
        y = y1 - frac * (y1 - y0)
        parts.append(
            f'<text x="{x0 - 6}" y="{y + 3:.1f}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif">{value:.4g}</text>'
        )
    return parts


def _document(body: list[str]) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        '<rect width="100%" height="100%" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def line_plot(path, series: list[tuple[str, np.ndarray]], title: str = "") -> Path:
    """Overlayed line plot; series is a list of (label, 1-D values)."""
    x0, y0, x1, y1 = MARGIN, 24, WIDTH - 10, HEIGHT - 24
    ys = [np.asarray(y, dtype=float).reshape(-1) for _, y in series]
    n = max(len(y) for y in ys)
    lo = min(float(y.min()) for y in ys)
    hi = max(float(y.max()) for y in ys)
    if hi == lo:
        hi = lo + 1.0
    body = _axes(x0, y0, x1, y1, (0, n - 1), (lo, hi), title)
    for i, ((label, _), y) in enumerate(zip(series, ys)):
        px = x0 + (x1 - x0) * np.arange(len(y)) / max(1, n - 1)
        py = y1 - (y1 - y0) * (y - lo) / (hi - lo)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        color = COLORS[i % len(COLORS)]
        body.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{points}"/>'
        )
        body.append(
            f'<text x="{x1 - 6}" y="{y0 + 14 * (i + 1)}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif" fill="{color}">{label}</text>'
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_document(body))
    return path


def histogram_plot(
    path, groups: list[tuple[str, np.ndarray]], bins: int = 40, title: str = ""
) -> Path:
    """Overlayed histograms on shared bin edges, normalized to densities."""
    x0, y0, x1, y1 = MARGIN, 24, WIDTH - 10, HEIGHT - 24
    values = [np.asarray(v, dtype=float).reshape(-1) for _, v in groups]
    lo = min(float(v.min()) for v in values)
    hi = max(float(v.max()) for v in values)
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    hists = [np.histogram(v, bins=edges, density=True)[0] for v in values]
    top = max(float(h.max()) for h in hists) or 1.0
    body = _axes(x0, y0, x1, y1, (lo, hi), (0, top), title)
    bar_w = (x1 - x0) / bins
    for i, ((label, _), h) in enumerate(zip(groups, hists)):
        color = COLORS[i % len(COLORS)]
        for j, density in enumerate(h):
            if density <= 0:
                continue
            bx = x0 + j * bar_w
            bh = (y1 - y0) * density / top
            body.append(
                f'<rect x="{bx:.2f}" y="{y1 - bh:.2f}" width="{bar_w:.2f}" '
                f'height="{bh:.2f}" fill="{color}" fill-opacity="0.45"/>'
            )
        body.append(
            f'<text x="{x1 - 6}" y="{y0 + 14 * (i + 1)}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif" fill="{color}">{label}</text>'
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_document(body))
    return path
