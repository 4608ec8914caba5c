"""Reconstruction-error accounting and report tables.

ISE compares curves on the normal scale; symmetric-difference and
direction-specific errors compare the actual region polygon with the region
bounded by a re-transformed approximation, in the region's planar frame.
"""

from __future__ import annotations

import io
from typing import Mapping, Optional, Sequence

import numpy as np

from .fpca import variance_explained
from .geometry import Polygon, contains, polygon_area
from .starhull import AngularGrid, ray_hits

QUARTILES = (25.0, 50.0, 75.0)


def ise(curve, approximation, grid: Optional[AngularGrid] = None) -> float:
    """Integrated squared error with the rectangle rule on the periodic grid."""
    x = np.asarray(curve, dtype=float)
    y = np.asarray(approximation, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"grid mismatch: {x.shape} vs {y.shape}")
    if grid is not None and x.shape[-1] != grid.m:
        raise ValueError(f"curves have {x.shape[-1]} points, grid has {grid.m}")
    w = 2 * np.pi / x.shape[-1]
    return float(w * np.sum((x - y) ** 2))


def star_polygon(radii, ref_point, grid: Optional[AngularGrid] = None) -> Polygon:
    """Polygon through ``ref_point + r(theta_t) * (cos, sin)`` at the grid angles."""
    r = np.asarray(radii, dtype=float)
    grid = grid or AngularGrid(r.size)
    t = grid.thetas
    return Polygon(np.column_stack([ref_point[0] + r * np.cos(t), ref_point[1] + r * np.sin(t)]))


def rasterize(polygon: Polygon, origin, step: float, shape) -> np.ndarray:
    """Boolean mask of raster cell centres ``origin + (k + 0.5) * step`` inside the polygon.

    Scanline even-odd fill, consistent with `rainshape.geometry.contains`.
    """
    nx, ny = shape
    xs = origin[0] + (np.arange(nx) + 0.5) * step
    ys = origin[1] + (np.arange(ny) + 0.5) * step
    a, b = polygon.edges()
    ay, by = a[:, 1], b[:, 1]
    out = np.zeros((nx, ny), dtype=bool)
    for k, y in enumerate(ys):
        straddle = (ay > y) != (by > y)
        if not straddle.any():
            continue
        ea, eb = a[straddle], b[straddle]
        xc = np.sort(ea[:, 0] + (y - ea[:, 1]) * (eb[:, 0] - ea[:, 0]) / (eb[:, 1] - ea[:, 1]))
        right = xc.size - np.searchsorted(xc, xs, side="right")
        out[:, k] = right % 2 == 1
    return out


def symmetric_difference_error(actual: Polygon, approx: Polygon, cell_size_km: float = 5.0,
                               oversample: int = 10) -> float:
    """Area of the symmetric difference as a percentage of the actual area.

    Both regions are rasterized on a sub-cell lattice of spacing
    ``cell_size_km / oversample`` anchored at the actual region's bounding box.
    """
    step = cell_size_km / oversample
    lo = actual.vertices.min(axis=0)
    hi = np.maximum(actual.vertices.max(axis=0), approx.vertices.max(axis=0))
    lo_all = np.minimum(lo, approx.vertices.min(axis=0))
    # extend the lattice by whole steps so it stays anchored at the actual region
    k0 = np.floor((lo_all - lo) / step) - 1
    origin = lo + k0 * step
    shape = tuple(int(v) for v in np.ceil((hi - origin) / step) + 1)
    ra = rasterize(actual, origin, step, shape)
    rb = rasterize(approx, origin, step, shape)
    diff = np.count_nonzero(ra ^ rb) * step * step
    return 100.0 * diff / polygon_area(actual)


def ray_intervals(polygon: Polygon, ref_point, theta: float, hits=None) -> list[tuple[float, float]]:
    """Maximal intervals of ray parameter s >= 0 whose points lie inside the polygon."""
    if hits is None:
        hits = ray_hits(polygon, ref_point, [theta])[0]
    hits = hits[hits > 0]
    if len(hits) == 0:
        return []
    breaks = np.concatenate([[0.0], hits])
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    ok = np.diff(breaks) > 0
    pts = np.column_stack([ref_point[0] + mids * np.cos(theta), ref_point[1] + mids * np.sin(theta)])
    inside = np.zeros(len(mids), dtype=bool)
    inside[ok] = contains(polygon, pts[ok])
    out: list[tuple[float, float]] = []
    for k in np.nonzero(inside)[0]:
        a, b = breaks[k], breaks[k + 1]
        if out and out[-1][1] == a:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _length(intervals) -> float:
    return float(sum(b - a for a, b in intervals))


def _intersection_length(xs, ys) -> float:
    total = 0.0
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                total += hi - lo
    return total


def p_theta_from_intervals(delta, eta) -> float:
    """100 * l(delta sym-diff eta) / l(delta); NaN when delta is empty."""
    ld = _length(delta)
    if ld <= 0:
        return float("nan")
    sym = ld + _length(eta) - 2.0 * _intersection_length(delta, eta)
    return 100.0 * max(sym, 0.0) / ld


def directional_error_p_theta(actual: Polygon, approx, ref_point, theta: float) -> float:
    """Direction-specific percentage error along the ray at ``theta``.

    ``approx`` is either a polygon (ray traced like the actual region) or the
    approximating radius at ``theta``, i.e. the interval [0, r].
    """
    delta = ray_intervals(actual, ref_point, theta)
    if isinstance(approx, Polygon):
        eta = ray_intervals(approx, ref_point, theta)
    else:
        eta = [(0.0, float(approx))]
    return p_theta_from_intervals(delta, eta)


def p_theta_profile(actual: Polygon, approx_radii, ref_point, grid: Optional[AngularGrid] = None) -> np.ndarray:
    """p_theta at every grid angle for a star-shaped approximation given by its radii."""
    r = np.asarray(approx_radii, dtype=float)
    grid = grid or AngularGrid(r.size)
    t = grid.thetas
    hits = ray_hits(actual, ref_point, t)
    out = np.empty(grid.m)
    for k in range(grid.m):
        delta = ray_intervals(actual, ref_point, t[k], hits=hits[k])
        out[k] = p_theta_from_intervals(delta, [(0.0, r[k])])
    return out


def lower_median_index(values) -> int:
    order = np.argsort(np.asarray(values, dtype=float), kind="stable")
    return int(order[(len(order) - 1) // 2])


def best_median_worst(errors) -> tuple[int, int, int]:
    """Indices of the smallest, lower-median and largest error (first occurrences)."""
    e = np.asarray(errors, dtype=float)
    if e.size < 3:
        raise ValueError("need at least 3 regions")
    return int(np.argmin(e)), lower_median_index(e), int(np.argmax(e))


def quartiles(values, with_range: bool = False) -> np.ndarray:
    q = (0.0,) + QUARTILES + (100.0,) if with_range else QUARTILES
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return np.full(len(q), np.nan)
    return np.percentile(v, q)


def quartile_curves(profiles) -> np.ndarray:
    """Pointwise quartiles ``(3, m)`` of per-contour angular profiles ``(n, m)``, ignoring NaN."""
    return np.nanpercentile(np.asarray(profiles, dtype=float), QUARTILES, axis=0)


# --- report tables ------------------------------------------------------------------

def _fmt(v) -> str:
    return "NA" if not np.isfinite(v) else f"{v:.2f}"


def table_variance_explained(eigenvalues, J: int = 12) -> str:
    """Cumulative percentage of variance for j = 1..J."""
    lam = np.asarray(eigenvalues, dtype=float)
    J = min(J, lam.size)
    out = io.StringIO()
    out.write(",".join(["j"] + [str(j) for j in range(1, J + 1)]) + "\n")
    out.write(",".join(["cumulative_pct"] + [_fmt(variance_explained(lam, j)) for j in range(1, J + 1)]) + "\n")
    return out.getvalue()


def table_group_eigenvalues(by_group: Mapping[str, Sequence[float]], J: int = 12) -> str:
    """Per-group percentage of variance of each of the first J components."""
    out = io.StringIO()
    out.write(",".join(["group"] + [str(j) for j in range(1, J + 1)]) + "\n")
    for g in sorted(by_group):
        lam = np.asarray(by_group[g], dtype=float)
        total = lam.sum()
        pct = [100.0 * lam[j] / total if (j < lam.size and total > 0) else float("nan") for j in range(J)]
        out.write(",".join([str(g)] + [_fmt(v) for v in pct]) + "\n")
    return out.getvalue()


def table_ise(ise_n, ise_p) -> str:
    """Range and quartiles of nonparametric and parametric ISE."""
    out = io.StringIO()
    out.write("approximation,0%,25%,50%,75%,100%\n")
    for name, vals in (("nonparametric", ise_n), ("parametric", ise_p)):
        out.write(",".join([name] + [_fmt(v) for v in quartiles(vals, with_range=True)]) + "\n")
    return out.getvalue()


def table_symdiff(errors_by_order: Mapping[int, Sequence[float]]) -> str:
    """Quartiles of the symmetric-difference percentage for each Fourier order."""
    orders = sorted(errors_by_order)
    qs = {d: quartiles(errors_by_order[d]) for d in orders}
    out = io.StringIO()
    out.write(",".join(["quartile"] + [str(d) for d in orders]) + "\n")
    for k, name in enumerate(("Q1", "Q2", "Q3")):
        out.write(",".join([name] + [_fmt(qs[d][k]) for d in orders]) + "\n")
    return out.getvalue()
