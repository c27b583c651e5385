"""Minimal SVG output: score-coloured scatter plots and level-set contours."""

from __future__ import annotations

import numpy as np

_SIZE = 480
_PAD = 20


def score_color(s: float) -> str:
    """Red for 0, blue for 1, linear in between."""
    s = float(np.clip(s, 0.0, 1.0))
    return f"rgb({round(255 * (1 - s))},0,{round(255 * s)})"


def _frame(xs, ys):
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = (_SIZE - 2 * _PAD) / span

    def tx(x):
        return _PAD + (x - x0) * scale

    def ty(y):
        return _SIZE - _PAD - (y - y0) * scale

    return tx, ty


def _doc(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">'
    )
    return "\n".join([head, f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>', *body, "</svg>"]) + "\n"


def scatter(points, scores, radius: float = 2.5) -> str:
    """Points of the complex plane coloured by score."""
    z = np.asarray(points, dtype=complex).ravel()
    tx, ty = _frame(z.real, z.imag)
    body = [
        f'<circle cx="{tx(p.real):.2f}" cy="{ty(p.imag):.2f}" r="{radius}" fill="{score_color(s)}"/>'
        for p, s in zip(z, scores)
    ]
    return _doc(body)


def contour_segments(xs, ys, field, level: float) -> list[tuple[float, float, float, float]]:
    """Marching squares: line segments of {field = level} on a rectangular grid."""
    F = np.asarray(field, dtype=float)
    segs = []

    def interp(pa, pb, fa, fb):
        t = 0.5 if fb == fa else (level - fa) / (fb - fa)
        return pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])

    for i in range(F.shape[0] - 1):
        for j in range(F.shape[1] - 1):
            corners = [
                ((xs[j], ys[i]), F[i, j]),
                ((xs[j + 1], ys[i]), F[i, j + 1]),
                ((xs[j + 1], ys[i + 1]), F[i + 1, j + 1]),
                ((xs[j], ys[i + 1]), F[i + 1, j]),
            ]
            cross = []
            for k in range(4):
                (pa, fa), (pb, fb) = corners[k], corners[(k + 1) % 4]
                if (fa <= level) != (fb <= level):
                    cross.append(interp(pa, pb, fa, fb))
            for k in range(0, len(cross) - 1, 2):
                segs.append((*cross[k], *cross[k + 1]))
    return segs


def heatmap(xs, ys, field, levels=(), points=None) -> str:
    """log10 of a positive field as grey cells, with contour lines at ``levels``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    F = np.asarray(field, dtype=float)
    tx, ty = _frame(xs, ys)
    L = np.log10(np.maximum(F, 1e-300))
    lo, hi = float(L.min()), float(L.max())
    span = hi - lo if hi > lo else 1.0
    dx = (xs[1] - xs[0]) if xs.size > 1 else 1.0
    dy = (ys[1] - ys[0]) if ys.size > 1 else 1.0
    w = abs(tx(xs[0] + dx) - tx(xs[0])) + 0.5
    h = abs(ty(ys[0] + dy) - ty(ys[0])) + 0.5
    body = []
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            g = round(255 * (1 - (L[i, j] - lo) / span))
            body.append(
                f'<rect x="{tx(x) - w / 2:.2f}" y="{ty(y) - h / 2:.2f}" width="{w:.2f}" '
                f'height="{h:.2f}" fill="rgb({g},{g},{g})"/>'
            )
    for lev in levels:
        for x0, y0, x1, y1 in contour_segments(xs, ys, F, lev):
            body.append(
                f'<line x1="{tx(x0):.2f}" y1="{ty(y0):.2f}" x2="{tx(x1):.2f}" y2="{ty(y1):.2f}" '
                'stroke="red" stroke-width="1.2"/>'
            )
    if points is not None:
        for p in np.asarray(points, dtype=complex).ravel():
            body.append(f'<circle cx="{tx(p.real):.2f}" cy="{ty(p.imag):.2f}" r="1.5" fill="blue"/>')
    return _doc(body)
