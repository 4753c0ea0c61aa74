"""Deterministic SVG line chart of mean cumulative regret against T."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .runner import AggregateRow

WIDTH, HEIGHT = 640, 400
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


def _scale(v: float, lo: float, hi: float, a: float, b: float) -> float:
    return a if hi == lo else a + (v - lo) / (hi - lo) * (b - a)


def render_svg(rows: Sequence[AggregateRow]) -> str:
    if not rows:
        raise ValueError("nothing to plot")
    algos = sorted({r.algorithm for r in rows})
    xs = [r.T for r in rows]
    ys = [r.mean_cum_regret for r in rows]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    left, right, top, bottom = MARGIN, WIDTH - MARGIN // 2, MARGIN // 2, HEIGHT - MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
        f'<text x="{(left + right) // 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="12">T</text>',
        f'<text x="15" y="{(top + bottom) // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {(top + bottom) // 2})">mean cumulative regret</text>',
    ]
    for k, v in enumerate(sorted(set(xs))):
        px = _scale(v, x0, x1, left, right)
        out.append(f'<text x="{px:.2f}" y="{bottom + 15}" text-anchor="middle" font-size="10">{v}</text>')
    for frac in (0.0, 0.5, 1.0):
        v = y0 + frac * (y1 - y0)
        py = _scale(v, y0, y1, bottom, top)
        out.append(f'<text x="{left - 5}" y="{py:.2f}" text-anchor="end" font-size="10">{v:.4g}</text>')
    for k, algo in enumerate(algos):
        pts = sorted((r.T, r.mean_cum_regret) for r in rows if r.algorithm == algo)
        color = COLORS[k % len(COLORS)]
        coords = " ".join(f"{_scale(x, x0, x1, left, right):.2f},{_scale(y, y0, y1, bottom, top):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = top + 15 * (k + 1)
        out.append(f'<text x="{left + 10}" y="{ly}" font-size="11" fill="{color}">{algo}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(rows: Sequence[AggregateRow], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(render_svg(rows))
    return path
