"""Plain SVG emitters for firing rasters and sweep heatmaps (no plotting dependency)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .engine import FiringLog
from .phase_model import PhaseMap


def _svg(width, height, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>", ""])


def raster_svg(log: FiringLog, t_start: float = 0.0, t_end: float | None = None,
               period_marks: list[float] | None = None, title: str = "") -> str:
    """One row per oscillator, one tick per firing; optional dashed period boundaries."""
    if t_end is None:
        t_end = max((r.time for r in log), default=1.0)
    span = max(t_end - t_start, 1e-12)
    left, right, top, row = 50, 20, 30, 24
    width = 720
    height = top + row * log.n + 30
    plot_w = width - left - right
    x = lambda t: left + plot_w * (t - t_start) / span
    body = []
    if title:
        body.append(f'<text x="{left}" y="18" font-size="12">{escape(title)}</text>')
    for i in range(log.n):
        y0 = top + row * i
        body.append(f'<text x="8" y="{y0 + 16}" font-size="11">{i}</text>')
        body.append(f'<line x1="{left}" y1="{y0 + 12}" x2="{width - right}" y2="{y0 + 12}" '
                    f'stroke="#ccc" stroke-width="0.5"/>')
    for t, i, _ in log:
        if t_start <= t <= t_end:
            y0 = top + row * i
            body.append(f'<line x1="{x(t):.2f}" y1="{y0 + 3}" x2="{x(t):.2f}" y2="{y0 + 21}" '
                        f'stroke="black" stroke-width="1.5"/>')
    for t in period_marks or ():
        body.append(f'<line x1="{x(t):.2f}" y1="{top - 4}" x2="{x(t):.2f}" '
                    f'y2="{top + row * log.n}" stroke="gray" stroke-dasharray="4,3"/>')
    axis_y = top + row * log.n + 16
    body.append(f'<text x="{left}" y="{axis_y}" font-size="11">t = {t_start:.3g}</text>')
    body.append(f'<text x="{width - right - 60}" y="{axis_y}" font-size="11">t = {t_end:.3g}</text>')
    return _svg(width, height, body)


def heatmap_svg(cells, phase_map: PhaseMap, title: str = "") -> str:
    """Black where ``p_hat > 0`` on the (tau, eps) unit square, with the
    dashed curve ``f(tau) + eps = 1`` separating the two regions."""
    size, margin = 400, 40
    taus = sorted({c.tau for c in cells})
    epss = sorted({c.eps for c in cells})
    cw = size / max(len(taus), 1)
    ch = size / max(len(epss), 1)
    sx = lambda tau: margin + size * tau
    sy = lambda eps: margin + size * (1.0 - eps)
    body = []
    if title:
        body.append(f'<text x="{margin}" y="20" font-size="12">{escape(title)}</text>')
    body.append(f'<rect x="{margin}" y="{margin}" width="{size}" height="{size}" '
                f'fill="none" stroke="black"/>')
    for c in cells:
        if c.p_hat > 0:
            body.append(f'<rect x="{sx(c.tau) - cw / 2:.2f}" y="{sy(c.eps) - ch / 2:.2f}" '
                        f'width="{cw:.2f}" height="{ch:.2f}" fill="black"/>')
    tt = np.linspace(0.0, 1.0, 201)
    ee = 1.0 - phase_map.f(tt)
    pts = " ".join(f"{sx(t):.2f},{sy(e):.2f}" for t, e in zip(tt, ee))
    body.append(f'<polyline points="{pts}" fill="none" stroke="gray" stroke-width="1.5" '
                f'stroke-dasharray="6,4"/>')
    body.append(f'<text x="{margin + size / 2 - 10}" y="{margin + size + 28}" font-size="12">tau</text>')
    body.append(f'<text x="6" y="{margin + size / 2}" font-size="12">eps</text>')
    return _svg(size + 2 * margin, size + 2 * margin, body)
