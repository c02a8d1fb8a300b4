"""Minimal static SVG line plots, written directly without a renderer.

Only what the scenario runner needs: one axes box, several polyline series
with a small legend, linear or log-log scales, deterministic text output.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 40, 56
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m for m in (1.0, 2.0, 2.5, 5.0, 10.0)), key=lambda m: abs(m * mag - raw)) * mag
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * abs(step):
        out.append(t)
        t += step
    return out or [lo]


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_exp = math.floor(math.log10(lo))
    hi_exp = math.ceil(math.log10(hi))
    return [10.0**e for e in range(lo_exp, hi_exp + 1)
            if lo * (1 - 1e-12) <= 10.0**e <= hi * (1 + 1e-12)] or [lo]


def line_plot(series, path, title: str = "", xlabel: str = "",
              ylabel: str = "", loglog: bool = False) -> None:
    """Write a line plot to ``path``.

    ``series`` is a list of (label, xs, ys) with matching lengths; log-log
    plots silently drop nonpositive points.
    """
    cleaned = []
    for label, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.shape != ys.shape:
            raise ParameterError(f"series {label!r} has mismatched lengths")
        keep = np.isfinite(xs) & np.isfinite(ys)
        if loglog:
            keep &= (xs > 0) & (ys > 0)
        cleaned.append((str(label), xs[keep], ys[keep]))
    points = [(x, y) for _, xs, ys in cleaned for x, y in zip(xs, ys)]
    body = []
    if points:
        px = [p[0] for p in points]
        py = [p[1] for p in points]
        x_lo, x_hi = min(px), max(px)
        y_lo, y_hi = min(py), max(py)
        if loglog:
            sx_lo, sx_hi = math.log10(x_lo), math.log10(x_hi)
            sy_lo, sy_hi = math.log10(y_lo), math.log10(y_hi)
        else:
            sx_lo, sx_hi, sy_lo, sy_hi = x_lo, x_hi, y_lo, y_hi
        if sx_hi - sx_lo < 1e-12:
            sx_lo, sx_hi = sx_lo - 0.5, sx_hi + 0.5
        if sy_hi - sy_lo < 1e-12:
            sy_lo, sy_hi = sy_lo - 0.5, sy_hi + 0.5
        plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
        plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

        def to_px(x, y):
            sx = math.log10(x) if loglog else x
            sy = math.log10(y) if loglog else y
            u = _MARGIN_L + (sx - sx_lo) / (sx_hi - sx_lo) * plot_w
            v = _HEIGHT - _MARGIN_B - (sy - sy_lo) / (sy_hi - sy_lo) * plot_h
            return u, v

        x_ticks = _log_ticks(x_lo, x_hi) if loglog else _ticks(x_lo, x_hi)
        y_ticks = _log_ticks(y_lo, y_hi) if loglog else _ticks(y_lo, y_hi)
        for t in x_ticks:
            u, _ = to_px(t, y_hi)
            body.append(f'<line x1="{_fmt(u)}" y1="{_MARGIN_T}" x2="{_fmt(u)}" '
                        f'y2="{_HEIGHT - _MARGIN_B}" stroke="#dddddd"/>')
            body.append(f'<text x="{_fmt(u)}" y="{_HEIGHT - _MARGIN_B + 18}" '
                        f'text-anchor="middle" font-size="11">{_fmt(t)}</text>')
        for t in y_ticks:
            _, v = to_px(x_lo, t)
            body.append(f'<line x1="{_MARGIN_L}" y1="{_fmt(v)}" '
                        f'x2="{_WIDTH - _MARGIN_R}" y2="{_fmt(v)}" stroke="#dddddd"/>')
            body.append(f'<text x="{_MARGIN_L - 6}" y="{_fmt(v + 4)}" '
                        f'text-anchor="end" font-size="11">{_fmt(t)}</text>')
        for k, (label, xs, ys) in enumerate(cleaned):
            if not xs.size:
                continue
            color = _COLORS[k % len(_COLORS)]
            pts = " ".join(f"{_fmt(to_px(x, y)[0])},{_fmt(to_px(x, y)[1])}"
                           for x, y in zip(xs, ys))
            body.append(f'<polyline fill="none" stroke="{color}" '
                        f'stroke-width="1.5" points="{pts}"/>')
            ly = _MARGIN_T + 16 + 16 * k
            body.append(f'<line x1="{_WIDTH - 180}" y1="{ly - 4}" '
                        f'x2="{_WIDTH - 160}" y2="{ly - 4}" stroke="{color}" '
                        'stroke-width="2"/>')
            body.append(f'<text x="{_WIDTH - 154}" y="{ly}" '
                        f'font-size="11">{label}</text>')
    body.append(f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" '
                f'width="{_WIDTH - _MARGIN_L - _MARGIN_R}" '
                f'height="{_HEIGHT - _MARGIN_T - _MARGIN_B}" '
                'fill="none" stroke="#333333"/>')
    if title:
        body.append(f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
                    f'font-size="14" font-weight="bold">{title}</text>')
    if xlabel:
        body.append(f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 12}" '
                    f'text-anchor="middle" font-size="12">{xlabel}</text>')
    if ylabel:
        body.append(f'<text x="16" y="{_HEIGHT // 2}" text-anchor="middle" '
                    f'font-size="12" transform="rotate(-90 16 {_HEIGHT // 2})">'
                    f'{ylabel}</text>')
    doc = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
           f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">\n'
           f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>\n'
           + "\n".join(body) + "\n</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc)
