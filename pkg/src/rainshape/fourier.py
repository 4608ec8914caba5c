"""Truncated Fourier models of curves on a uniform periodic grid.

    X(theta) = sum_{i=0}^{d} A_i cos(i theta) + sum_{i=1}^{d} B_i sin(i theta) + e(theta)

On the uniform grid the least-squares design is orthogonal, so coefficients
are discrete Fourier projections.  The polar form writes each harmonic as
``C_i cos(i (theta - phi_i))`` with ``C_i >= 0`` for i >= 1 and ``C_0 = A_0``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .starhull import AngularGrid

DEFAULT_ORDER = 6
DEFAULT_MAX_ORDER = 12


@dataclass(frozen=True)
class FourierModel:
    d: int
    A: np.ndarray  # A_0..A_d
    B: np.ndarray  # B_1..B_d
    rss: float = float("nan")
    sigma2: float = float("nan")

    def __post_init__(self):
        if len(self.A) != self.d + 1 or len(self.B) != self.d:
            raise ValueError(f"order {self.d} needs {self.d + 1} cosine and {self.d} sine coefficients")

    def harmonic(self, i: int) -> tuple[float, float]:
        """``(A_i, B_i)``; B_0 is 0."""
        if not 0 <= i <= self.d:
            raise ValueError(f"harmonic {i} outside 0..{self.d}")
        return float(self.A[i]), (float(self.B[i - 1]) if i else 0.0)


@dataclass(frozen=True)
class PolarForm:
    C: np.ndarray    # C_0..C_d
    phi: np.ndarray  # phi_1..phi_d, with i * phi_i = atan2(B_i, A_i)

    @property
    def d(self) -> int:
        return len(self.C) - 1


def _trig(thetas: np.ndarray, d: int):
    i = np.arange(d + 1)[:, None]
    arg = i * thetas[None, :]
    return np.cos(arg), np.sin(arg[1:])


def fit_fourier(curve, d: int, grid: Optional[AngularGrid] = None) -> FourierModel:
    """Least-squares order-d fit on the uniform grid (exact discrete projection)."""
    y = np.asarray(curve, dtype=float)
    m = y.size
    grid = grid or AngularGrid(m)
    if d < 0 or 2 * d + 1 > m:
        raise ValueError(f"order {d} needs 2d+1 <= m = {m}")
    cos, sin = _trig(grid.thetas, d)
    A = (2.0 / m) * (cos @ y)
    A[0] = y.mean()
    B = (2.0 / m) * (sin @ y)
    fitted = A @ cos + B @ sin
    resid = y - fitted
    rss = float(resid @ resid)
    dof = m - (2 * d + 1)
    sigma2 = rss / dof if dof > 0 else float("nan")
    return FourierModel(d, A, B, rss, sigma2)


def evaluate(model, thetas) -> np.ndarray:
    """Value of a `FourierModel` or `PolarForm` at ``thetas``."""
    t = np.asarray(thetas, dtype=float)
    if isinstance(model, PolarForm):
        out = np.full(t.shape, model.C[0], dtype=float)
        for i in range(1, model.d + 1):
            out = out + model.C[i] * np.cos(i * t - i * model.phi[i - 1])
        return out
    out = np.full(t.shape, model.A[0], dtype=float)
    for i in range(1, model.d + 1):
        out = out + model.A[i] * np.cos(i * t) + model.B[i - 1] * np.sin(i * t)
    return out


def to_polar(model: FourierModel) -> PolarForm:
    A, B = np.asarray(model.A), np.asarray(model.B)
    i = np.arange(1, model.d + 1)
    C = np.concatenate([[A[0]], np.hypot(A[1:], B)])
    phi = np.arctan2(B, A[1:]) / i
    return PolarForm(C, phi)


def risk_curve(curve, d_max: int = DEFAULT_MAX_ORDER, grid: Optional[AngularGrid] = None) -> np.ndarray:
    """Unbiased risk estimate RSS(d)/m + 2 sigma^2 (2d+1)/m for d = 0..d_max.

    sigma^2 is the residual variance of the order-d_max fit.  RSS values at
    rounding level relative to the curve's energy are treated as exact zeros.
    """
    y = np.asarray(curve, dtype=float)
    m = y.size
    if 2 * d_max + 1 > m:
        raise ValueError(f"d_max {d_max} needs 2*d_max+1 <= m = {m}")
    grid = grid or AngularGrid(m)
    floor = 1e-20 * max(float(y @ y), np.finfo(float).tiny)
    rss = np.array([fit_fourier(y, d, grid).rss for d in range(d_max + 1)])
    rss = np.where(rss <= floor, 0.0, rss)
    dof = m - (2 * d_max + 1)
    sigma2 = rss[-1] / dof if dof > 0 else 0.0
    d = np.arange(d_max + 1)
    return rss / m + 2.0 * sigma2 * (2 * d + 1) / m


def select_order(curve, d_max: int = DEFAULT_MAX_ORDER, grid: Optional[AngularGrid] = None) -> int:
    """Order minimizing `risk_curve`; ties go to the smaller order."""
    risk = risk_curve(curve, d_max, grid)
    best = risk.min()
    tol = 1e-12 * max(abs(best), np.finfo(float).tiny)
    return int(np.nonzero(risk <= best + tol)[0][0])


def retransformed_amplitudes(models: Sequence[FourierModel], nmap) -> np.ndarray:
    """g(C_i) for every model (rows) and harmonic i = 0..d (columns)."""
    C = np.vstack([to_polar(m).C for m in models])
    return nmap.invert(C)


def amplitude_histograms(amplitudes: np.ndarray, bins: int = 30) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-harmonic ``(counts, edges)`` of re-transformed amplitudes."""
    return [np.histogram(amplitudes[:, i], bins=bins) for i in range(amplitudes.shape[1])]


def harmonic_pairs(models: Sequence[FourierModel], i: int = 2) -> np.ndarray:
    """``(n, 2)`` array of ``(A_i, B_i)`` over models."""
    return np.array([m.harmonic(i) for m in models])


def scott_bandwidth(data: np.ndarray) -> np.ndarray:
    """Per-axis Scott bandwidth sigma_j * n^(-1/(dim+4))."""
    n, dim = data.shape
    return data.std(axis=0, ddof=1) * n ** (-1.0 / (dim + 4))


def _kde(points: np.ndarray, data: np.ndarray, h: np.ndarray, chunk: int = 4096) -> np.ndarray:
    out = np.empty(len(points))
    for s in range(0, len(points), chunk):
        p = points[s:s + chunk]
        z = (p[:, None, :] - data[None, :, :]) / h
        out[s:s + chunk] = np.exp(-0.5 * (z ** 2).sum(axis=-1)).sum(axis=1)
    return out / (len(data) * np.prod(h) * 2 * np.pi)


def modal_axiality(pairs, grid_size: int = 200, mean_shift_iter: int = 50) -> tuple[float, float]:
    """Mode of the bivariate Gaussian KDE of ``(A_2, B_2)`` pairs.

    The density (Scott bandwidth per axis) is evaluated on a grid spanning the
    data's bounding box widened by one bandwidth, and the best grid node is
    refined by mean-shift iterations.
    """
    data = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if len(data) == 0:
        raise ValueError("no pairs")
    if np.all(data == data[0]):
        return float(data[0, 0]), float(data[0, 1])
    if len(data) < 2:
        raise ValueError("need at least two distinct pairs")
    h = scott_bandwidth(data)
    axes = []
    for j in range(2):
        if h[j] > 0:
            axes.append(np.linspace(data[:, j].min() - h[j], data[:, j].max() + h[j], grid_size))
        else:
            axes.append(np.array([data[0, j]]))
    h = np.where(h > 0, h, 1.0)
    gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    dens = _kde(nodes, data, h)
    x = nodes[int(np.argmax(dens))].copy()
    for _ in range(mean_shift_iter):
        k = np.exp(-0.5 * (((data - x) / h) ** 2).sum(axis=1))
        if k.sum() == 0:
            break
        new = (k[:, None] * data).sum(axis=0) / k.sum()
        if np.max(np.abs(new - x)) < 1e-12:
            x = new
            break
        x = new
    return float(x[0]), float(x[1])


def axiality_contour(a2: float, b2: float, nmap, grid: Optional[AngularGrid] = None):
    """Re-transformed second-harmonic contour g(a2 cos 2t + b2 sin 2t) and its diameter angle.

    The diameter angle ``0.5 * atan2(b2, a2)`` lies in (-pi/2, pi/2]; it is
    NaN when both coefficients vanish (a circle).
    """
    grid = grid or AngularGrid()
    t = grid.thetas
    radius = nmap.invert(a2 * np.cos(2 * t) + b2 * np.sin(2 * t))
    if a2 == 0 and b2 == 0:
        angle = float("nan")
    else:
        angle = 0.5 * float(np.arctan2(b2, a2))
    return radius, angle


def dumps_models(models: Sequence[FourierModel], contour_ids: Sequence[str]) -> str:
    d = max(m.d for m in models) if models else 0
    cols = (["contour_id", "d"] + [f"A_{i}" for i in range(d + 1)] + [f"B_{i}" for i in range(1, d + 1)]
            + [f"C_{i}" for i in range(d + 1)] + [f"phi_{i}" for i in range(1, d + 1)] + ["rss"])
    out = io.StringIO()
    out.write(",".join(cols) + "\n")
    for cid, mdl in zip(contour_ids, models):
        pol = to_polar(mdl)
        pad = lambda arr, k: [repr(float(v)) for v in arr] + [""] * (k - len(arr))
        row = ([str(cid), str(mdl.d)] + pad(mdl.A, d + 1) + pad(mdl.B, d) + pad(pol.C, d + 1)
               + pad(pol.phi, d) + [repr(float(mdl.rss))])
        out.write(",".join(row) + "\n")
    return out.getvalue()
