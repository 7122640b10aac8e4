"""Minimal static SVG line plots (no plotting dependency).

Plots are derived views: every figure written by the CLI has a CSV sibling
holding exactly the plotted numbers.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62, 16, 30, 46


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: str = ""
    color: Optional[str] = None
    dashed: bool = False


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _linear_ticks(lo: float, hi: float, target: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float):
    ticks = []
    e = math.floor(math.log10(lo))
    while 10.0**e <= hi * (1.0 + 1e-12):
        if 10.0**e >= lo * (1.0 - 1e-12):
            ticks.append(10.0**e)
        e += 1
    if len(ticks) < 2:
        return _linear_ticks(lo, hi)
    return ticks


def render_line_plot(
    series: Sequence[Series],
    xlabel: str = "",
    ylabel: str = "",
    title: str = "",
    loglog: bool = False,
    width: int = 640,
    height: int = 440,
) -> str:
    """Render series as an SVG document string."""
    if not series:
        raise ValueError("nothing to plot")
    xs = [float(v) for s in series for v in s.x]
    ys = [float(v) for s in series for v in s.y]
    if loglog and (min(xs) <= 0 or min(ys) <= 0):
        raise ValueError("log-log plot requires strictly positive data")

    if loglog:
        tx = math.log10
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        pad_x = 0.05 * (tx(x_hi) - tx(x_lo) or 1.0)
        pad_y = 0.05 * (tx(y_hi) - tx(y_lo) or 1.0)
        xt_lo, xt_hi = tx(x_lo) - pad_x, tx(x_hi) + pad_x
        yt_lo, yt_hi = tx(y_lo) - pad_y, tx(y_hi) + pad_y
        x_ticks = _log_ticks(x_lo, x_hi)
        y_ticks = _log_ticks(y_lo, y_hi)
    else:
        tx = float
        span_x = (max(xs) - min(xs)) or 1.0
        span_y = (max(ys) - min(ys)) or 1.0
        xt_lo, xt_hi = min(xs) - 0.05 * span_x, max(xs) + 0.05 * span_x
        yt_lo, yt_hi = min(ys) - 0.05 * span_y, max(ys) + 0.05 * span_y
        x_ticks = _linear_ticks(xt_lo, xt_hi)
        y_ticks = _linear_ticks(yt_lo, yt_hi)

    pw = width - _MARGIN_L - _MARGIN_R
    ph = height - _MARGIN_T - _MARGIN_B

    def px(v: float) -> float:
        return _MARGIN_L + pw * (tx(v) - xt_lo) / (xt_hi - xt_lo)

    def py(v: float) -> float:
        return _MARGIN_T + ph * (1.0 - (tx(v) - yt_lo) / (yt_hi - yt_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="19" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    for t in x_ticks:
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_MARGIN_T + ph}" x2="{x:.2f}" '
            f'y2="{_MARGIN_T + ph + 5}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_MARGIN_T + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in y_ticks:
        y = py(t)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" '
            f'y2="{y:.2f}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_MARGIN_L + pw / 2:.1f}" y="{height - 8}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        yc = _MARGIN_T + ph / 2
        parts.append(
            f'<text x="14" y="{yc:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {yc:.1f})">{ylabel}</text>'
        )

    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(s.x, s.y))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.6"{dash}/>'
        )

    legend_y = _MARGIN_T + 14
    for i, s in enumerate(series):
        if not s.label:
            continue
        color = s.color or PALETTE[i % len(PALETTE)]
        lx = _MARGIN_L + pw - 150
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(
            f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 22}" y2="{legend_y - 4}" '
            f'stroke="{color}" stroke-width="1.6"{dash}/>'
        )
        parts.append(
            f'<text x="{lx + 27}" y="{legend_y}" font-family="sans-serif" '
            f'font-size="11">{s.label}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(path, svg_text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_text)
        if not svg_text.endswith("\n"):
            fh.write("\n")
