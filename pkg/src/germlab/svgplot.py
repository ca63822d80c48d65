"""Minimal deterministic SVG plots (no plotting dependency, byte-stable output)."""
from __future__ import annotations

import math

import numpy as np

from . import __version__

_W, _H = 640, 420
_MARGIN = 56
_COLORS = ("#1f6fb2", "#c0392b", "#2a9d5c", "#8e44ad", "#e67e22", "#16a085",
           "#7f8c8d", "#2c3e50")


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


def _header(title: str) -> list[str]:
    return [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f"<!-- germlab {__version__} -->",
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]


def _axis_transform(xs, ys, logx: bool, logy: bool):
    fx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    fy = (lambda v: math.log10(v)) if logy else (lambda v: v)
    tx = [fx(v) for v in xs]
    ty = [fy(v) for v in ys]
    x0, x1 = min(tx), max(tx)
    y0, y1 = min(ty), max(ty)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def to_px(x, y):
        px = _MARGIN + (fx(x) - x0) / (x1 - x0) * (_W - 2 * _MARGIN)
        py = _H - _MARGIN - (fy(y) - y0) / (y1 - y0) * (_H - 2 * _MARGIN)
        return px, py

    return to_px, (x0, x1, y0, y1)


def line_chart(series, title: str, xlabel: str, ylabel: str,
               logx: bool = False, logy: bool = False) -> str:
    """series: iterable of (xs, ys, label). Values <= 0 are dropped on log axes."""
    cleaned = []
    for xs, ys, label in series:
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)
               if (not logx or x > 0) and (not logy or y > 0)]
        if pts:
            cleaned.append((pts, label))
    parts = _header(title)
    if not cleaned:
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
    all_x = [p[0] for pts, _ in cleaned for p in pts]
    all_y = [p[1] for pts, _ in cleaned for p in pts]
    to_px, _bounds = _axis_transform(all_x, all_y, logx, logy)
    parts.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
                 f'height="{_H - 2 * _MARGIN}" fill="none" stroke="#888"/>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="16" y="{_H // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {_H // 2})">{ylabel}</text>')
    for i, (pts, label) in enumerate(cleaned):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in
                          (to_px(x, y) for x, y in pts))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MARGIN + 4}" y="{_MARGIN + 14 * (i + 1)}" '
                     f'font-family="sans-serif" font-size="10" fill="{color}" '
                     f'text-anchor="end">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def direction_chart(reps: np.ndarray, title: str) -> str:
    """Direction set on the circle (n = 2) or orthographic sphere view (n = 3)."""
    reps = np.asarray(reps, dtype=float)
    parts = _header(title)
    cx, cy = _W / 2, (_H + 20) / 2
    radius = min(_W, _H) / 2 - _MARGIN
    parts.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(radius)}" '
                 f'fill="none" stroke="#888"/>')
    if reps.shape[1] == 2:
        proj = reps
    elif reps.shape[1] == 3:
        # orthographic projection onto the first two coordinates,
        # rear hemisphere drawn hollow
        proj = reps[:, :2]
    else:
        parts.append(f'<text x="{cx}" y="{cy}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">'
                     f"{reps.shape[0]} directions in R^{reps.shape[1]}</text>")
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
    for i, row in enumerate(proj):
        px = cx + row[0] * radius
        py = cy - row[1] * radius
        hollow = reps.shape[1] == 3 and reps[i, 2] < 0
        fill = "none" if hollow else _COLORS[0]
        parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="3" '
                     f'fill="{fill}" stroke="{_COLORS[0]}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
