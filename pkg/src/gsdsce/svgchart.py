"""Tiny static SVG line charts, no plotting dependency.

CSV files are the canonical experiment output; these charts exist so a run
can drop a quick visual next to them. Only what the experiment figures
need: multiple labelled polylines, linear or log axes, ticks and a legend.
"""

from __future__ import annotations

import math

_MARGIN_LEFT = 64.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 46.0

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / max(target_ticks, 1)
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * magnitude:
            return mult * magnitude
    return 10.0 * magnitude


def _linear_ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        return [lo]
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-12 * step:
        ticks.append(round(value / step) * step)
        value += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_exp = math.ceil(math.log10(lo) - 1e-9)
    hi_exp = math.floor(math.log10(hi) + 1e-9)
    stride = max(1, (hi_exp - lo_exp) // 8)
    return [10.0**e for e in range(lo_exp, hi_exp + 1, stride)]


def _format_tick(value: float) -> str:
    if value == 0:
        return "0"
    if abs(value) >= 1e4 or abs(value) < 1e-3:
        return f"{value:.0e}"
    return f"{value:g}"


def line_chart(
    path,
    series: list[tuple[str, list[float], list[float]]],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    xlog: bool = False,
    ylog: bool = False,
    width: float = 720.0,
    height: float = 460.0,
) -> None:
    """Write an SVG chart of the given ``(label, xs, ys)`` series.

    Non-finite points are dropped; log axes additionally drop non-positive
    values.
    """
    cleaned = []
    for label, xs, ys in series:
        pts = [
            (float(x), float(y))
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y) and (not xlog or x > 0) and (not ylog or y > 0)
        ]
        if pts:
            cleaned.append((label, pts))
    if not cleaned:
        raise ValueError("no drawable points")

    all_x = [p[0] for _, pts in cleaned for p in pts]
    all_y = [p[1] for _, pts in cleaned for p in pts]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + (abs(x_lo) or 1.0)
    if y_hi == y_lo:
        y_hi = y_lo + (abs(y_lo) or 1.0)
    if not ylog:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def to_px(x: float, y: float) -> tuple[float, float]:
        if xlog:
            fx = (math.log10(x) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo))
        else:
            fx = (x - x_lo) / (x_hi - x_lo)
        if ylog:
            fy = (math.log10(y) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
        else:
            fy = (y - y_lo) / (y_hi - y_lo)
        return _MARGIN_LEFT + fx * plot_w, _MARGIN_TOP + (1.0 - fy) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>'
        )

    x_ticks = _log_ticks(x_lo, x_hi) if xlog else _linear_ticks(x_lo, x_hi)
    y_ticks = _log_ticks(y_lo, y_hi) if ylog else _linear_ticks(y_lo, y_hi)
    for tx in x_ticks:
        px, _ = to_px(tx, y_hi)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MARGIN_TOP:.1f}" x2="{px:.1f}" '
            f'y2="{_MARGIN_TOP + plot_h:.1f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{_MARGIN_TOP + plot_h + 16:.1f}" '
            f'text-anchor="middle">{_format_tick(tx)}</text>'
        )
    for ty in y_ticks:
        _, py = to_px(x_lo, ty)
        parts.append(
            f'<line x1="{_MARGIN_LEFT:.1f}" y1="{py:.1f}" x2="{_MARGIN_LEFT + plot_w:.1f}" '
            f'y2="{py:.1f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6:.1f}" y="{py + 4:.1f}" '
            f'text-anchor="end">{_format_tick(ty)}</text>'
        )

    parts.append(
        f'<rect x="{_MARGIN_LEFT:.1f}" y="{_MARGIN_TOP:.1f}" width="{plot_w:.1f}" '
        f'height="{plot_h:.1f}" fill="none" stroke="#333333"/>'
    )
    if xlabel:
        parts.append(
            f'<text x="{_MARGIN_LEFT + plot_w / 2:.1f}" y="{height - 10:.1f}" '
            f'text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        cy = _MARGIN_TOP + plot_h / 2
        parts.append(
            f'<text x="14" y="{cy:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {cy:.1f})">{ylabel}</text>'
        )

    for i, (label, pts) in enumerate(cleaned):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in map(lambda p: to_px(*p), pts))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = _MARGIN_TOP + 14 + 16 * i
        lx = _MARGIN_LEFT + plot_w - 150
        parts.append(f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 22:.1f}" y2="{ly - 4:.1f}" stroke="{color}" stroke-width="1.8"/>')
        parts.append(f'<text x="{lx + 28:.1f}" y="{ly:.1f}">{label}</text>')

    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
