"""Deterministic SVG 1.1 line charts without a plotting library."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

DASHES = {"solid": None, "dashed": "8,5", "dashdot": "9,4,2,4", "dotted": "2,4"}


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _f(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class Line:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    color: str = "#1f4fd8"
    dash: str = "solid"
    width: float = 1.2


@dataclass
class Markers:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    shape: str = "up"  # "up" (△) or "down" (∇)
    color: str = "#000000"
    size: float = 3.5


@dataclass
class Band:
    label: str
    x: Sequence[float]
    lower: Sequence[float]
    upper: Sequence[float]
    color: str = "#d62728"
    opacity: float = 0.18


@dataclass
class Chart:
    title: str
    x_label: str = "t"
    y_label: str = ""
    lines: list[Line] = field(default_factory=list)
    markers: list[Markers] = field(default_factory=list)
    bands: list[Band] = field(default_factory=list)
    hlines: list[float] = field(default_factory=list)
    width: int = 960
    height: int = 540
    metadata: Optional[str] = None


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * abs(step):
        ticks.append(round(v, 12))
        v += step
    return ticks


def _fmt_tick(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s in ("-0", "0") else s


def render(chart: Chart) -> str:
    W, H = chart.width, chart.height
    left, right, top, bottom = 70, 170, 44, 52
    pw, ph = W - left - right, H - top - bottom

    xs: list[float] = []
    ys: list[float] = []
    for ln in chart.lines:
        xs += list(ln.x)
        ys += list(ln.y)
    for mk in chart.markers:
        xs += list(mk.x)
        ys += list(mk.y)
    for b in chart.bands:
        xs += list(b.x)
        ys += list(b.lower) + list(b.upper)
    ys += chart.hlines
    xs = [v for v in xs if math.isfinite(v)]
    ys = [v for v in ys if math.isfinite(v)]
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        pad = abs(y0) * 0.05 or 1.0
        y0, y1 = y0 - pad, y1 + pad
    pad = (y1 - y0) * 0.04
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="Helvetica, Arial, sans-serif">',
    ]
    if chart.metadata:
        out.append(f"<metadata>{_esc(chart.metadata)}</metadata>")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>')
    out.append(f'<text x="{_f(left + pw / 2)}" y="26" text-anchor="middle" font-size="16">'
               f"{_esc(chart.title)}</text>")

    out.append('<g stroke="#e6e6e6" stroke-width="1" font-size="11" fill="#444444">')
    for ty in _nice_ticks(y0, y1):
        y = py(ty)
        out.append(f'<line x1="{_f(left)}" y1="{_f(y)}" x2="{_f(left + pw)}" y2="{_f(y)}"/>')
        out.append(f'<text x="{_f(left - 6)}" y="{_f(y + 4)}" text-anchor="end" stroke="none">'
                   f"{_fmt_tick(ty)}</text>")
    for tx in _nice_ticks(x0, x1):
        x = px(tx)
        out.append(f'<line x1="{_f(x)}" y1="{_f(top)}" x2="{_f(x)}" y2="{_f(top + ph)}"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(top + ph + 16)}" text-anchor="middle" stroke="none">'
                   f"{_fmt_tick(tx)}</text>")
    out.append("</g>")
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333333"/>')
    out.append(f'<text x="{_f(left + pw / 2)}" y="{H - 12}" text-anchor="middle" font-size="12">'
               f"{_esc(chart.x_label)}</text>")
    out.append(f'<text x="16" y="{_f(top + ph / 2)}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {_f(top + ph / 2)})">{_esc(chart.y_label)}</text>')

    for hv in chart.hlines:
        out.append(f'<line x1="{_f(left)}" y1="{_f(py(hv))}" x2="{_f(left + pw)}" y2="{_f(py(hv))}" '
                   'stroke="#888888" stroke-width="1"/>')

    legend: list[tuple[str, str]] = []
    for b in chart.bands:
        upper = [f"{_f(px(x))},{_f(py(y))}" for x, y in zip(b.x, b.upper)]
        lower = [f"{_f(px(x))},{_f(py(y))}" for x, y in zip(b.x, b.lower)]
        pts = " ".join(upper + lower[::-1])
        out.append(f'<polygon points="{pts}" fill="{b.color}" fill-opacity="{b.opacity}" stroke="none"/>')
        legend.append((b.label, f'<rect width="18" height="9" y="-7" fill="{b.color}" '
                                f'fill-opacity="{b.opacity}"/>'))
    for ln in chart.lines:
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(ln.x, ln.y)
                       if math.isfinite(y))
        dash = DASHES.get(ln.dash, ln.dash)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{ln.color}" '
                   f'stroke-width="{ln.width}"{dash_attr}/>')
        legend.append((ln.label, f'<line x1="0" y1="-3" x2="18" y2="-3" stroke="{ln.color}" '
                                 f'stroke-width="2"{dash_attr}/>'))
    for mk in chart.markers:
        s = mk.size
        glyphs = []
        for x, y in zip(mk.x, mk.y):
            cx, cy = px(x), py(y)
            if mk.shape == "down":
                pts = f"{_f(cx - s)},{_f(cy - s)} {_f(cx + s)},{_f(cy - s)} {_f(cx)},{_f(cy + s)}"
            else:
                pts = f"{_f(cx - s)},{_f(cy + s)} {_f(cx + s)},{_f(cy + s)} {_f(cx)},{_f(cy - s)}"
            glyphs.append(f'<polygon points="{pts}"/>')
        out.append(f'<g fill="none" stroke="{mk.color}" stroke-width="1">' + "".join(glyphs) + "</g>")
        sym = "∇" if mk.shape == "down" else "△"
        legend.append((f"{sym} {mk.label}", f'<circle cx="9" cy="-3" r="3" fill="{mk.color}"/>'))

    lx, ly = left + pw + 14, top + 12
    for i, (label, glyph) in enumerate(legend):
        y = ly + 20 * i
        out.append(f'<g transform="translate({_f(lx)},{_f(y)})">{glyph}'
                   f'<text x="24" y="0" font-size="12">{_esc(label)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
