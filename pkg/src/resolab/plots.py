"""Minimal SVG line plots for the sweep diagnostics.

Output is plain SVG 1.1 with one ``<polyline>`` per series and fixed
number formatting, so reruns produce byte-identical files.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["Series", "line_plot"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 50


class Series:
    def __init__(self, label, xs, ys, dashed=False):
        self.label = label
        self.xs = list(xs)
        self.ys = list(ys)
        self.dashed = dashed


def _fmt(v):
    return f"{v:.3f}"


def _range(vals, log):
    vals = [math.log10(v) if log else v for v in vals if math.isfinite(v) and (v > 0 or not log)]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(series, *, title, xlabel, ylabel, logx=False, logy=False):
    """Render ``series`` to an SVG document string.

    Points that are non-finite (or nonpositive on a log axis) are dropped.
    """
    xr = _range([x for s in series for x in s.xs], logx)
    yr = _range([y for s in series for y in s.ys], logy)

    def px(x):
        v = math.log10(x) if logx else x
        return _ML + (v - xr[0]) / (xr[1] - xr[0]) * (_W - _ML - _MR)

    def py(y):
        v = math.log10(y) if logy else y
        return _H - _MB - (v - yr[0]) / (yr[1] - yr[0]) * (_H - _MT - _MB)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
        f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" font-size="13">'
        f'{escape(xlabel + (" (log10)" if logx else ""))}</text>',
        f'<text x="16" y="{_H // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_H // 2})">{escape(ylabel + (" (log10)" if logy else ""))}</text>',
    ]
    for v, anchor in ((xr[0], "start"), (xr[1], "end")):
        x = _ML if anchor == "start" else _W - _MR
        out.append(f'<text x="{x}" y="{_H - _MB + 16}" text-anchor="{anchor}" '
                   f'font-size="11">{v:.3g}</text>')
    for v, y in ((yr[0], _H - _MB), (yr[1], _MT + 10)):
        out.append(f'<text x="{_ML - 6}" y="{y}" text-anchor="end" font-size="11">{v:.3g}</text>')
    for i, s in enumerate(series):
        pts = [(x, y) for x, y in zip(s.xs, s.ys)
               if math.isfinite(x) and math.isfinite(y)
               and (x > 0 or not logx) and (y > 0 or not logy)]
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} '
                   f'points="{coords}"><title>{escape(s.label)}</title></polyline>')
        ly = _MT + 14 + 16 * i
        out.append(f'<text x="{_W - _MR - 8}" y="{ly}" text-anchor="end" font-size="12" '
                   f'fill="{color}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
