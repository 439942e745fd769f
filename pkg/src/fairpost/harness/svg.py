"""Grouped bar charts with error whiskers, written as plain SVG text."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["PALETTE", "grouped_bar_chart"]

PALETTE = {
    "orig": "#7f7f7f",
    "eop": "#1f77b4",
    "roc": "#ff7f0e",
    "igd": "#2ca02c",
}
_FALLBACK = ("#9467bd", "#8c564b", "#e377c2", "#17becf")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _nice_top(value: float) -> float:
    if value <= 0:
        return 1.0
    mag = 10 ** math.floor(math.log10(value))
    for step in (1, 1.2, 1.5, 2, 2.5, 3, 4, 5, 6, 8, 10):
        if step * mag >= value:
            return step * mag
    return 10 * mag


def grouped_bar_chart(groups, series, means, stds, title, ylabel, ideal=None,
                      width=720, height=360) -> str:
    """Return SVG text for a grouped bar chart.

    ``means[g][s]`` / ``stds[g][s]`` give bar height and whisker half-length
    for group ``g`` and series ``s``; ``None`` leaves the slot empty. A dotted
    horizontal line marks ``ideal`` when given.
    """
    left, right, top, bottom = 60, 110, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom
    peak = max([0.0] + [m + (s or 0.0) for row_m, row_s in zip(means, stds)
                        for m, s in zip(row_m, row_s) if m is not None])
    if ideal is not None:
        peak = max(peak, ideal)
    ymax = _nice_top(peak * 1.05)

    def y(v):
        return top + plot_h * (1.0 - v / ymax)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_f(width / 2)}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for i in range(6):
        v = ymax * i / 5
        out.append(f'<line x1="{left}" y1="{_f(y(v))}" x2="{left + plot_w}" y2="{_f(y(v))}" '
                   f'stroke="#e0e0e0" stroke-width="1"/>')
        out.append(f'<text x="{left - 6}" y="{_f(y(v) + 4)}" text-anchor="end">{v:.2f}</text>')
    out.append(f'<text x="16" y="{_f(top + plot_h / 2)}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_f(top + plot_h / 2)})">{escape(ylabel)}</text>')

    n_groups, n_series = len(groups), len(series)
    slot = plot_w / max(n_groups, 1)
    bar_w = slot * 0.8 / max(n_series, 1)
    for g, name in enumerate(groups):
        x0 = left + g * slot + slot * 0.1
        for s, sname in enumerate(series):
            m = means[g][s]
            if m is None:
                continue
            colour = PALETTE.get(sname, _FALLBACK[s % len(_FALLBACK)])
            bx = x0 + s * bar_w
            out.append(f'<rect x="{_f(bx)}" y="{_f(y(m))}" width="{_f(bar_w * 0.9)}" '
                       f'height="{_f(y(0) - y(m))}" fill="{colour}"/>')
            sd = stds[g][s]
            if sd:
                cx = bx + bar_w * 0.45
                lo, hi = max(m - sd, 0.0), m + sd
                out.append(f'<line x1="{_f(cx)}" y1="{_f(y(lo))}" x2="{_f(cx)}" y2="{_f(y(hi))}" '
                           f'stroke="black" stroke-width="1"/>')
                for yy in (lo, hi):
                    out.append(f'<line x1="{_f(cx - bar_w * 0.2)}" y1="{_f(y(yy))}" '
                               f'x2="{_f(cx + bar_w * 0.2)}" y2="{_f(y(yy))}" stroke="black" '
                               f'stroke-width="1"/>')
        out.append(f'<text x="{_f(left + g * slot + slot / 2)}" y="{_f(top + plot_h + 18)}" '
                   f'text-anchor="middle">{escape(name)}</text>')

    out.append(f'<line x1="{left}" y1="{_f(y(0))}" x2="{left + plot_w}" y2="{_f(y(0))}" '
               f'stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{_f(y(0))}" stroke="black" '
               f'stroke-width="1"/>')
    if ideal is not None:
        out.append(f'<line x1="{left}" y1="{_f(y(ideal))}" x2="{left + plot_w}" '
                   f'y2="{_f(y(ideal))}" stroke="black" stroke-width="1.5" '
                   f'stroke-dasharray="2,3"/>')

    lx = left + plot_w + 14
    for s, sname in enumerate(series):
        colour = PALETTE.get(sname, _FALLBACK[s % len(_FALLBACK)])
        ly = top + 10 + s * 18
        out.append(f'<rect x="{lx}" y="{ly}" width="12" height="12" fill="{colour}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly + 10}">{escape(sname.upper())}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
