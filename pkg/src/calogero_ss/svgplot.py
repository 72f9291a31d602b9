"""Static single-series SVG line plots, no plotting dependency.

Fixed 800x600 viewBox, linear or log-10 x axis, one polyline per series,
and a metadata block embedded as an SVG comment so every plot records the
conventions that produced it.  Output is deterministic: fixed tick count,
fixed float formatting, metadata sorted by key.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .errors import DomainError

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT = 80, 30
MARGIN_TOP, MARGIN_BOTTOM = 40, 60
TICKS = 5


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def render_line_plot(points: Sequence[tuple[float, float]], *,
                     x_label: str, y_label: str, title: str = "",
                     log_x: bool = False,
                     metadata: Mapping[str, str] | None = None) -> str:
    """SVG document for one polyline through the given points."""
    if len(points) < 2:
        raise DomainError("need at least two points to plot")
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    if log_x:
        if min(xs) <= 0.0:
            raise DomainError("log x axis needs positive x values")
        xs = [math.log10(x) for x in xs]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" '
             f'height="{HEIGHT}">']
    if metadata:
        body = "; ".join(f"{k}={metadata[k]}" for k in sorted(metadata))
        lines.append(f"<!-- {_escape(body)} -->")
    lines.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" '
                 'fill="white"/>')
    if title:
        lines.append(f'<text x="{WIDTH / 2:.1f}" y="24" font-size="16" '
                     f'text-anchor="middle">{_escape(title)}</text>')
    # axes
    x0, y0 = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    x1, y1 = WIDTH - MARGIN_RIGHT, MARGIN_TOP
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" '
                 'stroke="black"/>')
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" '
                 'stroke="black"/>')
    for i in range(TICKS):
        fx = x_lo + (x_hi - x_lo) * i / (TICKS - 1)
        gx = px(fx)
        label = 10.0 ** fx if log_x else fx
        lines.append(f'<line x1="{_fmt(gx)}" y1="{y0}" x2="{_fmt(gx)}" '
                     f'y2="{y0 + 5}" stroke="black"/>')
        lines.append(f'<text x="{_fmt(gx)}" y="{y0 + 20}" font-size="11" '
                     f'text-anchor="middle">{_tick_label(label)}</text>')
        fy = y_lo + (y_hi - y_lo) * i / (TICKS - 1)
        gy = py(fy)
        lines.append(f'<line x1="{x0 - 5}" y1="{_fmt(gy)}" x2="{x0}" '
                     f'y2="{_fmt(gy)}" stroke="black"/>')
        lines.append(f'<text x="{x0 - 8}" y="{_fmt(gy + 4)}" font-size="11" '
                     f'text-anchor="end">{_tick_label(fy)}</text>')
    lines.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" '
                 f'font-size="13" text-anchor="middle">{_escape(x_label)}'
                 '</text>')
    lines.append(f'<text x="20" y="{(y0 + y1) / 2:.1f}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 20 '
                 f'{(y0 + y1) / 2:.1f})">{_escape(y_label)}</text>')
    coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}"
                      for x, y in zip(xs, ys))
    lines.append(f'<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" '
                 f'points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
