"""Plain SVG line and contour charts, no external renderer."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"]

WIDTH, HEIGHT = 800, 520
LEFT, RIGHT, TOP, BOTTOM = 80, 170, 50, 60


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _nice_ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.4g}"


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xhi = xlo + 1.0
        if yhi == ylo:
            pad = abs(ylo) * 0.05 or 1.0
            ylo, yhi = ylo - pad, yhi + pad
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.pw = WIDTH - LEFT - RIGHT
        self.ph = HEIGHT - TOP - BOTTOM

    def px(self, x):
        return LEFT + (x - self.xlo) / (self.xhi - self.xlo) * self.pw

    def py(self, y):
        return HEIGHT - BOTTOM - (y - self.ylo) / (self.yhi - self.ylo) * self.ph


def _axes(fr: _Frame, title: str, x_label: str, y_label: str) -> List[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="18" font-family="sans-serif">{_escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{fr.pw}" height="{fr.ph}" fill="none" stroke="#333333"/>',
    ]
    for xt in _nice_ticks(fr.xlo, fr.xhi):
        x = fr.px(xt)
        out.append(f'<line x1="{x:.2f}" y1="{HEIGHT - BOTTOM}" x2="{x:.2f}" y2="{HEIGHT - BOTTOM + 5}" stroke="#333333"/>')
        out.append(f'<text x="{x:.2f}" y="{HEIGHT - BOTTOM + 20}" text-anchor="middle" font-size="12" font-family="sans-serif">{_fmt(xt)}</text>')
    for yt in _nice_ticks(fr.ylo, fr.yhi):
        y = fr.py(yt)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="#333333"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="12" font-family="sans-serif">{_fmt(yt)}</text>')
    out.append(f'<text x="{LEFT + fr.pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14" font-family="sans-serif">{_escape(x_label)}</text>')
    out.append(
        f'<text x="18" y="{TOP + fr.ph / 2:.1f}" text-anchor="middle" font-size="14" font-family="sans-serif" '
        f'transform="rotate(-90 18 {TOP + fr.ph / 2:.1f})">{_escape(y_label)}</text>'
    )
    return out


def _legend(names: Sequence[str]) -> List[str]:
    out = []
    for i, name in enumerate(names):
        y = TOP + 16 + 20 * i
        x = WIDTH - RIGHT + 14
        col = COLORS[i % len(COLORS)]
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{x + 28}" y="{y + 4}" font-size="12" font-family="sans-serif">{_escape(name)}</text>')
    return out


def line_chart(series: Iterable[Tuple[str, Sequence[float], Sequence[float]]], title: str,
               x_label: str, y_label: str, log_y: bool = False) -> str:
    """SVG text of a multi-series polyline chart.

    With ``log_y`` the values are plotted as ``log10`` and nonpositive
    points are dropped.
    """
    prepared = []
    for name, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if log_y:
            keep = ys > 0
            xs, ys = xs[keep], np.log10(ys[keep])
        keep = np.isfinite(xs) & np.isfinite(ys)
        prepared.append((name, xs[keep], ys[keep]))
    allx = np.concatenate([p[1] for p in prepared if len(p[1])] or [np.zeros(1)])
    ally = np.concatenate([p[2] for p in prepared if len(p[2])] or [np.zeros(1)])
    fr = _Frame(float(allx.min()), float(allx.max()), float(ally.min()), float(ally.max()))
    out = _axes(fr, title, x_label, f"log10 {y_label}" if log_y else y_label)
    for i, (name, xs, ys) in enumerate(prepared):
        if len(xs) == 0:
            continue
        pts = " ".join(f"{fr.px(x):.2f},{fr.py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.6" points="{pts}"/>')
    out.extend(_legend([p[0] for p in prepared]))
    out.append("</svg>")
    return "\n".join(out) + "\n"


# marching squares: corner bits (bl=1, br=2, tr=4, tl=8) -> edge pairs
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 5: [(3, 2), (0, 1)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(2, 0)], 10: [(2, 1), (0, 3)], 11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def contour_segments(xs, ys, Z, level: float):
    """Line segments of ``Z == level`` on the grid ``Z[j, i] = f(xs[i], ys[j])``."""
    xs, ys, Z = np.asarray(xs), np.asarray(ys), np.asarray(Z)
    segs = []
    for j in range(len(ys) - 1):
        for i in range(len(xs) - 1):
            c = (Z[j, i], Z[j, i + 1], Z[j + 1, i + 1], Z[j + 1, i])
            corners = ((xs[i], ys[j]), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1]))
            idx = sum(1 << b for b in range(4) if c[b] > level)
            if idx in (0, 15):
                continue

            def edge_point(e):
                a, b = e, (e + 1) % 4
                va, vb = c[a], c[b]
                s = 0.5 if va == vb else (level - va) / (vb - va)
                (xa, ya), (xb, yb) = corners[a], corners[b]
                return xa + s * (xb - xa), ya + s * (yb - ya)

            for e1, e2 in _CASES[idx]:
                segs.append((edge_point(e1), edge_point(e2)))
    return segs


def contour_chart(xs, ys, Z, levels: Sequence[float], title: str, x_label: str = "x", y_label: str = "y") -> str:
    fr = _Frame(float(np.min(xs)), float(np.max(xs)), float(np.min(ys)), float(np.max(ys)))
    out = _axes(fr, title, x_label, y_label)
    names = []
    for k, lev in enumerate(levels):
        col = COLORS[k % len(COLORS)]
        for (x1, y1), (x2, y2) in contour_segments(xs, ys, Z, lev):
            out.append(
                f'<line x1="{fr.px(x1):.2f}" y1="{fr.py(y1):.2f}" x2="{fr.px(x2):.2f}" y2="{fr.py(y2):.2f}" stroke="{col}" stroke-width="1.2"/>'
            )
        names.append(f"level {_fmt(lev)}")
    out.extend(_legend(names))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
