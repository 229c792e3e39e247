"""Tiny deterministic SVG emitters for line/scatter/ROC plots.

Purpose-built so repeated runs write byte-identical files (no timestamps,
ids or library-version drift); not a general plotting surface.
"""
from __future__ import annotations

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 18, 34, 46
PALETTE = ("#1f6fb2", "#d1495b", "#3a7d44", "#8a5a83", "#c77d2f", "#4d4d4d")


def _limits(values: np.ndarray) -> tuple[float, float]:
    lo = float(np.min(values))
    hi = float(np.max(values))
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


class _Canvas:
    def __init__(self, xlim, ylim, title, xlabel, ylabel):
        self.xlim, self.ylim = xlim, ylim
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>',
        ]
        self._axes(xlabel, ylabel)

    def x_px(self, x: float) -> float:
        lo, hi = self.xlim
        return MARGIN_L + (x - lo) / (hi - lo) * (WIDTH - MARGIN_L - MARGIN_R)

    def y_px(self, y: float) -> float:
        lo, hi = self.ylim
        return HEIGHT - MARGIN_B - (y - lo) / (hi - lo) * (
            HEIGHT - MARGIN_T - MARGIN_B)

    def _axes(self, xlabel, ylabel):
        x0, x1 = MARGIN_L, WIDTH - MARGIN_R
        y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
        self.parts.append(
            f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
            f'fill="none" stroke="#333333"/>')
        for tx in _ticks(*self.xlim):
            px = self.x_px(tx)
            self.parts.append(
                f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 4}" '
                f'stroke="#333333"/>')
            self.parts.append(
                f'<text x="{px:.2f}" y="{y0 + 16}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10">{tx:.3g}</text>')
        for ty in _ticks(*self.ylim):
            py = self.y_px(ty)
            self.parts.append(
                f'<line x1="{x0 - 4}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" '
                f'stroke="#333333"/>')
            self.parts.append(
                f'<text x="{x0 - 6}" y="{py + 3:.2f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="10">{ty:.3g}</text>')
        self.parts.append(
            f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 8}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="12">{xlabel}</text>')
        self.parts.append(
            f'<text x="14" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {(y0 + y1) / 2:.1f})">{ylabel}</text>')

    def polyline(self, xs, ys, color):
        pts = " ".join(f"{self.x_px(x):.2f},{self.y_px(y):.2f}"
                       for x, y in zip(xs, ys))
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>')

    def scatter(self, xs, ys, color):
        for x, y in zip(xs, ys):
            self.parts.append(
                f'<circle cx="{self.x_px(x):.2f}" cy="{self.y_px(y):.2f}" '
                f'r="2.2" fill="{color}" fill-opacity="0.7"/>')

    def legend(self, labels_colors):
        y = MARGIN_T + 14
        for label, color in labels_colors:
            x = WIDTH - MARGIN_R - 150
            self.parts.append(
                f'<rect x="{x}" y="{y - 9}" width="10" height="10" '
                f'fill="{color}"/>')
            self.parts.append(
                f'<text x="{x + 16}" y="{y}" font-family="sans-serif" '
                f'font-size="11">{label}</text>')
            y += 16

    def write(self, path):
        self.parts.append("</svg>")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.parts) + "\n")


def series_plot(path, x, series, title="", xlabel="t", ylabel="value") -> None:
    """Plot series over a shared x axis.

    ``series`` is a list of dicts with keys ``y`` (array), ``label`` and
    optional ``kind`` ("line" default, or "scatter").
    """
    x = np.asarray(x, dtype=float)
    all_y = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    canvas = _Canvas(_limits(x), _limits(all_y), title, xlabel, ylabel)
    legend = []
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        ys = np.asarray(s["y"], dtype=float)
        if s.get("kind", "line") == "scatter":
            canvas.scatter(x, ys, color)
        else:
            canvas.polyline(x, ys, color)
        legend.append((s.get("label", f"series {k}"), color))
    canvas.legend(legend)
    canvas.write(path)


def roc_plot(path, roc_points, auc, title="ROC") -> None:
    fprs = [p[0] for p in roc_points]
    tprs = [p[1] for p in roc_points]
    canvas = _Canvas((-0.02, 1.02), (-0.02, 1.02), f"{title} (AUC {auc:.3f})",
                     "false positive rate", "true positive rate")
    canvas.polyline([0.0, 1.0], [0.0, 1.0], "#bbbbbb")
    canvas.polyline(fprs, tprs, PALETTE[0])
    canvas.write(path)
