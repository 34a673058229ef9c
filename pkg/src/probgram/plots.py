"""Deterministic SVG plots (scatter, ROC).

Written by hand instead of a plotting library so that identical inputs yield
byte-identical files: no timestamps, font probing, or library version strings.
"""

from __future__ import annotations

from typing import Sequence

WIDTH, HEIGHT = 480, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 16, 34, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
N_TICKS = 5


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float) -> list[float]:
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    step = (hi - lo) / (N_TICKS - 1)
    return [lo + i * step for i in range(N_TICKS)]


class _Frame:
    """Maps data coordinates onto the plot rectangle."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.x_lo, self.x_hi = min(xs), max(xs)
        self.y_lo, self.y_hi = min(ys), max(ys)
        if self.x_lo == self.x_hi:
            self.x_lo, self.x_hi = self.x_lo - 1.0, self.x_hi + 1.0
        if self.y_lo == self.y_hi:
            self.y_lo, self.y_hi = self.y_lo - 1.0, self.y_hi + 1.0
        pad_x = 0.04 * (self.x_hi - self.x_lo)
        pad_y = 0.04 * (self.y_hi - self.y_lo)
        self.x_lo -= pad_x
        self.x_hi += pad_x
        self.y_lo -= pad_y
        self.y_hi += pad_y

    def px(self, x: float) -> float:
        frac = (x - self.x_lo) / (self.x_hi - self.x_lo)
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y: float) -> float:
        frac = (y - self.y_lo) / (self.y_hi - self.y_lo)
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)


def _axes(frame: _Frame, xlabel: str, ylabel: str, title: str) -> list[str]:
    left, right = MARGIN_L, WIDTH - MARGIN_R
    top, bottom = MARGIN_T, HEIGHT - MARGIN_B
    parts = [
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>',
        f'<text x="{(left + right) / 2:.1f}" y="{MARGIN_T - 12}" text-anchor="middle" '
        f'font-size="13" fill="#111111">{_esc(title)}</text>',
        f'<text x="{(left + right) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-size="12" fill="#111111">{_esc(xlabel)}</text>',
        f'<text x="16" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="12" '
        f'fill="#111111" transform="rotate(-90 16 {(top + bottom) / 2:.1f})">{_esc(ylabel)}</text>',
    ]
    for tx in _ticks(frame.x_lo, frame.x_hi):
        x = frame.px(tx)
        parts.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 4}" '
                     f'stroke="#333333"/>')
        parts.append(f'<text x="{x:.2f}" y="{bottom + 16}" text-anchor="middle" '
                     f'font-size="10" fill="#333333">{tx:.3g}</text>')
    for ty in _ticks(frame.y_lo, frame.y_hi):
        y = frame.py(ty)
        parts.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
                     f'stroke="#333333"/>')
        parts.append(f'<text x="{left - 7}" y="{y + 3:.2f}" text-anchor="end" '
                     f'font-size="10" fill="#333333">{ty:.3g}</text>')
    return parts


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _document(parts: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    return head + "\n" + "\n".join(parts) + "\n</svg>\n"


def svg_scatter(xs: Sequence[float], ys: Sequence[float], xlabel: str, ylabel: str,
                title: str, identity_line: bool = True) -> str:
    """Scatter plot; optionally draws the y = x reference over the shared range."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("svg_scatter needs equal-length, non-empty coordinates")
    frame = _Frame(xs, ys)
    parts = _axes(frame, xlabel, ylabel, title)
    if identity_line:
        lo = max(frame.x_lo, frame.y_lo)
        hi = min(frame.x_hi, frame.y_hi)
        if lo < hi:
            parts.append(f'<line x1="{frame.px(lo):.2f}" y1="{frame.py(lo):.2f}" '
                         f'x2="{frame.px(hi):.2f}" y2="{frame.py(hi):.2f}" '
                         f'stroke="#999999" stroke-dasharray="5,4"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{frame.px(x):.2f}" cy="{frame.py(y):.2f}" r="3" '
                     f'fill="{PALETTE[0]}" fill-opacity="0.65"/>')
    return _document(parts)


def svg_roc(curves: Sequence[tuple[str, Sequence[tuple[float, float]]]], title: str) -> str:
    """Step ROC curves with a legend; includes the chance diagonal."""
    if not curves:
        raise ValueError("svg_roc needs at least one curve")
    frame = _Frame([0.0, 1.0], [0.0, 1.0])
    parts = _axes(frame, "false positive rate", "true positive rate", title)
    parts.append(f'<line x1="{frame.px(0):.2f}" y1="{frame.py(0):.2f}" '
                 f'x2="{frame.px(1):.2f}" y2="{frame.py(1):.2f}" '
                 f'stroke="#999999" stroke-dasharray="5,4"/>')
    for i, (label, points) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{frame.px(fpr):.2f},{frame.py(tpr):.2f}" for fpr, tpr in points)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        ly = MARGIN_T + 14 + 14 * i
        parts.append(f'<line x1="{MARGIN_L + 8}" y1="{ly - 4}" x2="{MARGIN_L + 28}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{MARGIN_L + 33}" y="{ly}" font-size="10" '
                     f'fill="#111111">{_esc(label)}</text>')
    return _document(parts)
