"""Minimal SVG line-plot emitter for the CLI's optional figures."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def polylines(series: Sequence[tuple[str, np.ndarray, np.ndarray, bool]], title: str = "",
              width: int = 480, height: int = 480, equal_aspect: bool = False) -> str:
    """One SVG document; each series is ``(label, x, y, closed)``."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s[2], float) for s in series]) if series else np.zeros(1)
    x0, x1 = float(np.nanmin(xs)), float(np.nanmax(xs))
    y0, y1 = float(np.nanmin(ys)), float(np.nanmax(ys))
    sx = (x1 - x0) or 1.0
    sy = (y1 - y0) or 1.0
    if equal_aspect:
        sx = sy = max(sx, sy)
    pad = 30
    kx, ky = (width - 2 * pad) / sx, (height - 2 * pad) / sy

    def pts(x, y):
        return " ".join(f"{pad + (a - x0) * kx:.3f},{height - pad - (b - y0) * ky:.3f}" for a, b in zip(x, y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    if title:
        out.append(f'<title>{escape(title)}</title>')
    for k, (label, x, y, closed) in enumerate(series):
        tag = "polygon" if closed else "polyline"
        out.append(f'<{tag} fill="none" stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="1.2" '
                   f'points="{pts(x, y)}"><title>{escape(label)}</title></{tag}>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
