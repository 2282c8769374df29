"""Minimal standalone SVG line plots (lines and markers only)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

COLORS = ("#1f4e9c", "#111111", "#c0392b", "#2e8b57")
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 50


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_plot(series, title="", xlabel="", ylabel="", logy=False, metadata=""):
    """Render ``series`` = [(label, xs, ys, style)] where style is 'line', 'dots' or 'dashed'.

    Non-finite points are skipped.
    """
    pts = []
    for _, xs, ys, _ in series:
        for x, y in zip(xs, ys):
            if math.isfinite(x) and math.isfinite(y) and (y > 0 or not logy):
                pts.append((x, math.log10(y) if logy else y))
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if metadata:
        out.append(f"<!-- {escape(metadata).replace('--', '- -')} -->")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<text x="{sx(t):.1f}" y="{TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        label = f"{10 ** t:.3g}" if logy else f"{t:.3g}"
        out.append(f'<text x="{LEFT - 6}" y="{sy(t) + 4:.1f}" font-size="11" '
                   f'text-anchor="end">{label}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 10}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="18" font-size="14" '
               f'text-anchor="middle">{escape(title)}</text>')
    for i, (label, xs, ys, style) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        coords = [(sx(x), sy(math.log10(y) if logy else y)) for x, y in zip(xs, ys)
                  if math.isfinite(x) and math.isfinite(y) and (y > 0 or not logy)]
        if style in ("line", "dashed") and len(coords) > 1:
            dash = ' stroke-dasharray="6 4"' if style == "dashed" else ""
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       f'stroke-width="1.8"{dash}/>')
        if style in ("dots", "markers"):
            for x, y in coords:
                out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{color}"/>')
        if style == "crosses":
            for x, y in coords:
                out.append(f'<path d="M{x - 4:.2f},{y - 4:.2f}L{x + 4:.2f},{y + 4:.2f}'
                           f'M{x - 4:.2f},{y + 4:.2f}L{x + 4:.2f},{y - 4:.2f}" '
                           f'stroke="{color}" stroke-width="1.5"/>')
        ly = TOP + 16 + 16 * i
        out.append(f'<text x="{LEFT + pw - 8}" y="{ly}" font-size="12" fill="{color}" '
                   f'text-anchor="end">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
