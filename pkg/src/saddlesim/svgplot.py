"""Minimal self-contained SVG line plots for the report command.

No plotting dependency: each figure is a single SVG document with inline
styling, a fixed 960x600 viewBox, and 1-2-5 decade tick placement on both
axes.  Output is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

WIDTH, HEIGHT = 960, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 48, 56

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
)


@dataclass
class Series:
    x: list
    y: list
    label: str = ""
    color: str = ""


def _nice_step(span: float, target: int = 8) -> float:
    """Tick spacing of the form {1, 2, 5} * 10^k giving <= target intervals."""
    if span <= 0.0 or not math.isfinite(span):
        return 1.0
    raw = span / target
    k = math.floor(math.log10(raw))
    base = raw / 10**k
    for mult in (1.0, 2.0, 5.0):
        if base <= mult:
            return mult * 10**k
    return 10.0 ** (k + 1)


def _ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * max(1.0, abs(hi)):
        out.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return out


def _fmt(v: float) -> str:
    if v == 0.0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.6g}"


def line_plot(series: list[Series], title: str, xlabel: str, ylabel: str) -> str:
    """Render series as an SVG document string."""
    pts = [(float(x), float(y)) for s in series for x, y in zip(s.x, s.y)
           if math.isfinite(float(x)) and math.isfinite(float(y))]
    if pts:
        xlo = min(p[0] for p in pts)
        xhi = max(p[0] for p in pts)
        ylo = min(p[1] for p in pts)
        yhi = max(p[1] for p in pts)
    else:
        xlo, xhi, ylo, yhi = 0.0, 1.0, 0.0, 1.0
    if xhi - xlo <= 0:
        xhi = xlo + 1.0
    if yhi - ylo <= 0:
        yhi = ylo + 1.0
    pad = 0.04 * (yhi - ylo)
    ylo -= pad
    yhi += pad

    iw = WIDTH - MARGIN_L - MARGIN_R
    ih = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - xlo) / (xhi - xlo) * iw

    def sy(y):
        return MARGIN_T + (yhi - y) / (yhi - ylo) * ih

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="28" text-anchor="middle" '
        f'style="font:bold 18px sans-serif">{title}</text>',
    ]
    # axes frame
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{iw}" height="{ih}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for tx in _ticks(xlo, xhi):
        px = sx(tx)
        out.append(f'<line x1="{px:.1f}" y1="{MARGIN_T}" x2="{px:.1f}" '
                   f'y2="{MARGIN_T + ih}" stroke="#ddd" stroke-width="1"/>')
        out.append(f'<text x="{px:.1f}" y="{MARGIN_T + ih + 18}" text-anchor="middle" '
                   f'style="font:12px sans-serif">{_fmt(tx)}</text>')
    for ty in _ticks(ylo, yhi):
        py = sy(ty)
        out.append(f'<line x1="{MARGIN_L}" y1="{py:.1f}" x2="{MARGIN_L + iw}" '
                   f'y2="{py:.1f}" stroke="#ddd" stroke-width="1"/>')
        out.append(f'<text x="{MARGIN_L - 6}" y="{py + 4:.1f}" text-anchor="end" '
                   f'style="font:12px sans-serif">{_fmt(ty)}</text>')
    out.append(f'<text x="{MARGIN_L + iw / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'style="font:14px sans-serif">{xlabel}</text>')
    out.append(f'<text x="18" y="{MARGIN_T + ih / 2}" text-anchor="middle" '
               f'style="font:14px sans-serif" '
               f'transform="rotate(-90 18 {MARGIN_T + ih / 2})">{ylabel}</text>')

    for idx, s in enumerate(series):
        color = s.color or PALETTE[idx % len(PALETTE)]
        coords = " ".join(
            f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
            for x, y in zip(s.x, s.y)
            if math.isfinite(float(x)) and math.isfinite(float(y))
        )
        if coords:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"/>')
        if s.label:
            ly = MARGIN_T + 16 + 18 * idx
            out.append(f'<line x1="{MARGIN_L + iw - 150}" y1="{ly - 4}" '
                       f'x2="{MARGIN_L + iw - 120}" y2="{ly - 4}" stroke="{color}" '
                       f'stroke-width="2"/>')
            out.append(f'<text x="{MARGIN_L + iw - 114}" y="{ly}" '
                       f'style="font:12px sans-serif">{s.label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(path, series: list[Series], title: str, xlabel: str, ylabel: str) -> None:
    with open(path, "w") as fh:
        fh.write(line_plot(series, title, xlabel, ylabel))
