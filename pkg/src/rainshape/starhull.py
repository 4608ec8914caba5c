"""Star-hull radial functions and star-hull approximation error.

The star-hull of a contour with respect to a reference point O is traced by
the furthest intersection of each ray from O with the contour.  Angles are
measured counterclockwise from East on a uniform grid over [0, 2*pi).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .geometry import DegenerateGeometryError, Polygon, centroid, contains, convex_hull, polygon_area

DEFAULT_GRID_SIZE = 1000
_T_TOL = 1e-12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class AngularGrid:
    m: int = DEFAULT_GRID_SIZE
    thetas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 4:
            raise ValueError(f"angular grid needs m >= 4, got {self.m}")
        t = 2 * np.pi * np.arange(self.m) / self.m
        t.setflags(write=False)
        object.__setattr__(self, "thetas", t)

    @property
    def step(self) -> float:
        """Quadrature weight 2*pi/m."""
        return 2 * np.pi / self.m

    def index(self, theta: float) -> int:
        """Index of the grid angle nearest to ``theta`` (mod 2*pi)."""
        return int(np.round((theta % (2 * np.pi)) / self.step)) % self.m


@dataclass(frozen=True)
class RadialFunction:
    grid: AngularGrid
    values: np.ndarray
    ref_point: tuple
    censored: bool = False
    pass_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.m,):
            raise ValueError(f"expected {self.grid.m} radial values, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("radial values must be finite and strictly positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def points(self) -> np.ndarray:
        """Star-hull boundary samples in the planar frame, ``(m, 2)``."""
        t = self.grid.thetas
        ox, oy = self.ref_point
        return np.column_stack([ox + self.values * np.cos(t), oy + self.values * np.sin(t)])

    def polygon(self) -> Polygon:
        return Polygon(self.points())

    def area(self) -> float:
        """Star-hull area 0.5 * sum r^2 * dtheta (periodic trapezoid rule)."""
        return 0.5 * float(np.sum(self.values ** 2)) * self.grid.step


def reference_point(polygon: Polygon) -> tuple[float, float]:
    """Centroid of the convex hull of the polygon."""
    return centroid(convex_hull(polygon.vertices))


def ray_hits(polygon: Polygon, ref_point, thetas) -> list[np.ndarray]:
    """Sorted distinct ray parameters where each ray meets the polygon boundary.

    A ray through a vertex contributes that point once; an edge collinear
    with the ray contributes both of its endpoints.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    o = np.asarray(ref_point, dtype=float)
    a, b = polygon.edges()
    p = a - o                        # (E, 2)
    e = b - a                        # (E, 2)
    u = np.column_stack([np.cos(thetas), np.sin(thetas)])  # (M, 2)
    denom = u[:, 0:1] * e[None, :, 1] - u[:, 1:2] * e[None, :, 0]
    cross_pe = p[:, 0] * e[:, 1] - p[:, 1] * e[:, 0]
    cross_pu = p[None, :, 0] * u[:, 1:2] - p[None, :, 1] * u[:, 0:1]
    scale = np.hypot(e[:, 0], e[:, 1])[None, :]
    parallel = np.abs(denom) <= 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        s = cross_pe[None, :] / denom
        t = cross_pu / denom
    ok = (~parallel) & (t >= -_T_TOL) & (t <= 1 + _T_TOL) & (s >= 0)

    # collinear edges: both endpoints lie on the ray line
    span = max(float(np.ptp(polygon.vertices)), 1.0)
    on_line = parallel & (np.abs(cross_pu) <= 1e-12 * span)
    s_a = p[None, :, 0] * u[:, 0:1] + p[None, :, 1] * u[:, 1:2]
    q = b - o
    s_b = q[None, :, 0] * u[:, 0:1] + q[None, :, 1] * u[:, 1:2]

    tol = 1e-9 * span
    hits = []
    for k in range(len(thetas)):
        vals = list(s[k, ok[k]])
        for idx in np.nonzero(on_line[k])[0]:
            vals.extend(v for v in (s_a[k, idx], s_b[k, idx]) if v >= 0)
        vals = np.sort(np.asarray(vals, dtype=float))
        if len(vals) > 1:
            keep = np.concatenate([[True], np.diff(vals) > tol])
            vals = vals[keep]
        hits.append(vals)
    return hits


def radial_function(polygon: Polygon, ref_point=None, grid: AngularGrid | None = None,
                    censored: bool = False, pass_id: str = "") -> RadialFunction:
    """Furthest ray/boundary intersection distance at each grid angle.

    ``ref_point`` defaults to the centroid of the polygon's convex hull and
    must lie strictly inside that hull.
    """
    grid = grid or AngularGrid()
    hull = convex_hull(polygon.vertices)
    if ref_point is None:
        ref_point = centroid(hull)
    ref_point = (float(ref_point[0]), float(ref_point[1]))
    if not contains(hull, [ref_point])[0]:
        raise GeometryError(f"reference point {ref_point} is not inside the convex hull")
    hits = ray_hits(polygon, ref_point, grid.thetas)
    values = np.empty(grid.m)
    for k, h in enumerate(hits):
        if len(h) == 0 or h[-1] <= 0:
            raise GeometryError(f"ray at theta={grid.thetas[k]:.6f} misses the contour")
        values[k] = h[-1]
    return RadialFunction(grid, values, ref_point, censored=censored, pass_id=pass_id)


def starhull_overall_error(polygon: Polygon, radial: RadialFunction) -> float:
    """Star-hull area in excess of the region's area, as a percentage of the region's area."""
    a = polygon_area(polygon)
    return 100.0 * (radial.area() - a) / a


def multi_intersection_measure(polygon: Polygon, ref_point, grid: AngularGrid | None = None) -> float:
    """Angular measure (radians) of grid directions whose ray meets the contour more than once."""
    grid = grid or AngularGrid()
    hits = ray_hits(polygon, ref_point, grid.thetas)
    return grid.step * sum(1 for h in hits if len(h) > 1)


def inside_length(polygon: Polygon, ref_point, theta: float, s_max: float, hits=None) -> float:
    """Length of the part of the segment [O, O + s_max*u(theta)] that lies inside the polygon."""
    if hits is None:
        hits = ray_hits(polygon, ref_point, [theta])[0]
    breaks = np.concatenate([[0.0], hits[(hits > 0) & (hits < s_max)], [s_max]])
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    lengths = np.diff(breaks)
    nz = lengths > 0
    if not nz.any():
        return 0.0
    ox, oy = ref_point
    pts = np.column_stack([ox + mids[nz] * np.cos(theta), oy + mids[nz] * np.sin(theta)])
    return float(lengths[nz][contains(polygon, pts)].sum())


def directional_error(polygon: Polygon, radial: RadialFunction, theta: float) -> float:
    """Fraction of the segment from O to the star-hull boundary at ``theta`` outside the region."""
    k = radial.grid.index(theta)
    t = radial.grid.thetas[k]
    r = radial.values[k]
    frac = 1.0 - inside_length(polygon, radial.ref_point, t, r) / r
    return min(max(frac, 0.0), 1.0)


def directional_error_profile(polygon: Polygon, radial: RadialFunction) -> np.ndarray:
    """`directional_error` at every grid angle."""
    t = radial.grid.thetas
    hits = ray_hits(polygon, radial.ref_point, t)
    out = np.empty(len(t))
    for k in range(len(t)):
        r = radial.values[k]
        frac = 1.0 - inside_length(polygon, radial.ref_point, t[k], r, hits=hits[k]) / r
        out[k] = min(max(frac, 0.0), 1.0)
    return out


# --- serialization ------------------------------------------------------------

def dumps_radial(radial: RadialFunction) -> str:
    out = io.StringIO()
    out.write(f"# ref_x={float(radial.ref_point[0])!r}\n")
    out.write(f"# ref_y={float(radial.ref_point[1])!r}\n")
    out.write(f"# censored={'true' if radial.censored else 'false'}\n")
    out.write(f"# pass_id={radial.pass_id}\n")
    out.write("theta,r_km\n")
    for t, r in zip(radial.grid.thetas, radial.values):
        out.write(f"{float(t)!r},{float(r)!r}\n")
    return out.getvalue()


def loads_radial(text: str) -> RadialFunction:
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        elif line.strip() and not line.startswith("theta"):
            t, r = line.split(",")
            rows.append((float(t), float(r)))
    values = np.array([r for _, r in rows])
    grid = AngularGrid(len(values))
    return RadialFunction(
        grid, values, (float(meta["ref_x"]), float(meta["ref_y"])),
        censored=meta.get("censored", "false") == "true", pass_id=meta.get("pass_id", ""),
    )
