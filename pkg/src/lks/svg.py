"""Minimal SVG line plots (no plotting library needed)."""

from __future__ import annotations

from collections.abc import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _bounds(values: np.ndarray) -> tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def plot(series: Sequence[tuple[np.ndarray, np.ndarray]], *, title: str = "", xlabel: str = "x",
         ylabel: str = "y", vlines: Sequence[float] = (), points: Sequence[tuple[float, float]] = ()) -> str:
    """One or more polylines; ``vlines`` are dashed verticals (zeros, marks),
    ``points`` are circled (tangencies)."""
    xs_all = [np.asarray(x, float) for x, _ in series]
    ys_all = [np.asarray(y, float) for _, y in series]
    finite = [(x[np.isfinite(x) & np.isfinite(y)], y[np.isfinite(x) & np.isfinite(y)])
              for x, y in zip(xs_all, ys_all)]
    allx = np.concatenate([x for x, _ in finite] + [np.asarray([p[0] for p in points], float)])
    ally = np.concatenate([y for _, y in finite] + [np.asarray([p[1] for p in points], float)])
    if allx.size == 0:
        allx, ally = np.zeros(1), np.zeros(1)
    x0, x1 = _bounds(allx)
    y0, y1 = _bounds(ally)

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
           f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="black"/>']
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN}" y1="{sy(0):.2f}" x2="{WIDTH - MARGIN}" y2="{sy(0):.2f}" '
                   'stroke="#999"/>')
    for v in vlines:
        if x0 <= v <= x1:
            out.append(f'<line x1="{sx(v):.2f}" y1="{MARGIN}" x2="{sx(v):.2f}" y2="{HEIGHT - MARGIN}" '
                       'stroke="#888" stroke-dasharray="4,3"/>')
    for i, (x, y) in enumerate(finite):
        if x.size:
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" '
                       f'stroke-width="1.5" points="{pts}"/>')
    for a, b in points:
        out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="4" fill="none" stroke="black"/>')
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{sx(v):.2f}" y="{HEIGHT - MARGIN + 16}" font-size="11" '
                   f'text-anchor="{anchor}">{v:.4g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{MARGIN - 4}" y="{sy(v):.2f}" font-size="11" text-anchor="end">{v:.4g}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" font-size="12" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="{MARGIN - 16}" font-size="14" text-anchor="middle">'
                   f'{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
