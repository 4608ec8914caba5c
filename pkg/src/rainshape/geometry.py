"""Planar projection, boundary polygons of cell clusters, and polygon basics.

Coordinates in the planar frame are kilometres with x pointing East and y
pointing North.  Each region is projected in its own frame, centred on the
bounding box of its boundary contour.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .ingest import Snapshot

EARTH_RADIUS_KM = 6371.0
DEG = np.pi / 180.0
PINCH_OFFSET_KM = 1e-9


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BoundingRegion:
    lt_min: float
    lt_max: float
    ln_min: float
    ln_max: float

    def __post_init__(self):
        if self.lt_min > self.lt_max or self.ln_min > self.ln_max:
            raise ValueError("bounding region limits are inverted")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.lt_min + self.lt_max), 0.5 * (self.ln_min + self.ln_max))


class Polygon:
    """Simple polygon, vertices ``(k, 2)`` in km, implicitly closed, counterclockwise.

    Clockwise input is reversed on construction.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(v) >= 2 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise DegenerateGeometryError(f"polygon needs at least 3 vertices, got {len(v)}")
        a = signed_area(v)
        if a == 0:
            raise DegenerateGeometryError("polygon has zero area")
        if a < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        self.vertices = v

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polygon({len(self)} vertices, area={polygon_area(self):.6g})"

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of every edge, each ``(k, 2)``."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(self.vertices + np.array([dx, dy]))


def signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_area(polygon) -> float:
    """Shoelace area in km^2."""
    v = polygon.vertices if isinstance(polygon, Polygon) else np.asarray(polygon, dtype=float)
    if len(v) < 3:
        raise DegenerateGeometryError("need at least 3 vertices")
    return abs(signed_area(v))


def centroid(polygon) -> tuple[float, float]:
    """Area-weighted centroid."""
    v = polygon.vertices if isinstance(polygon, Polygon) else np.asarray(polygon, dtype=float)
    if len(v) < 3:
        raise DegenerateGeometryError("need at least 3 vertices")
    # shift to the first vertex for numerical stability far from the origin
    origin = v[0]
    p = v - origin
    q = np.roll(p, -1, axis=0)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    a = 0.5 * cross.sum()
    if a == 0:
        raise DegenerateGeometryError("polygon has zero area")
    cx = ((p[:, 0] + q[:, 0]) * cross).sum() / (6 * a)
    cy = ((p[:, 1] + q[:, 1]) * cross).sum() / (6 * a)
    return (float(cx + origin[0]), float(cy + origin[1]))


def convex_hull(points) -> Polygon:
    """Counterclockwise convex hull (monotone chain), collinear vertices dropped."""
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        raise DegenerateGeometryError("convex hull needs at least 3 distinct points")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateGeometryError("all points are collinear")
    return Polygon(np.array(hull))


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest of the segments a[k]->b[k]."""
    d = b - a
    len2 = np.einsum("ij,ij->i", d, d)
    len2 = np.where(len2 == 0, 1.0, len2)
    rel = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nkj,kj->nk", rel, d) / len2, 0.0, 1.0)
    nearest = a[None] + t[..., None] * d[None]
    return np.sqrt(((points[:, None, :] - nearest) ** 2).sum(axis=-1)).min(axis=1)


def contains(polygon: Polygon, points, tol: float = 0.0) -> np.ndarray:
    """Even-odd point-in-polygon test; points within ``tol`` of the boundary count as inside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = polygon.edges()
    x, y = pts[:, 0:1], pts[:, 1:2]
    ay, by = a[None, :, 1], b[None, :, 1]
    straddle = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = a[None, :, 0] + (y - ay) * (b[None, :, 0] - a[None, :, 0]) / (by - ay)
    inside = (straddle & (x < x_cross)).sum(axis=1) % 2 == 1
    if tol > 0:
        inside |= _segment_distance(pts, a, b) <= tol
    return inside


def is_simple(polygon: Polygon) -> bool:
    """True when no two non-adjacent edges intersect (O(k^2), for validation)."""
    a, b = polygon.edges()
    k = len(a)
    for e in range(k):
        p, r = a[e], b[e] - a[e]
        q, s = a, b - a
        denom = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = q - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / denom
            u = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / denom
        hit = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        for f in np.nonzero(hit)[0]:
            if f == e or f == (e + 1) % k or e == (f + 1) % k:
                continue
            return False
    return True


def bounding_region(latlon: Iterable) -> BoundingRegion:
    pts = np.asarray(list(latlon) if not isinstance(latlon, np.ndarray) else latlon, dtype=float)
    if pts.size == 0:
        raise ValueError("bounding region of an empty point set")
    pts = pts.reshape(-1, 2)
    lt, ln = pts[:, 0], pts[:, 1]
    return BoundingRegion(float(lt.min()), float(lt.max()), float(ln.min()), float(ln.max()))


def project(lat, lon, bounds: BoundingRegion, R_km: float = EARTH_RADIUS_KM):
    """Map latitude/longitude (degrees) to planar km about the centre of ``bounds``.

    x = R cos(lat) (lon - lon_c) and y = R (lat - lat_c), angles in radians.
    Works elementwise on arrays.
    """
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    lat_c, lon_c = bounds.center
    x = R_km * np.cos(lat * DEG) * (lon - lon_c) * DEG
    y = R_km * (lat - lat_c) * DEG
    if x.ndim == 0:
        return float(x), float(y)
    return x, y


# --- boundary polygons of cell clusters -------------------------------------

def _median_steps(snapshot: Snapshot, R_km: float):
    """Snapshot-wide median lat/lon step along grid_i and along grid_j."""
    cells = snapshot.cells
    di, dj = [], []
    for (i, j), (lat, lon, _) in cells.items():
        if (i + 1, j) in cells:
            la, lo, _ = cells[(i + 1, j)]
            di.append((la - lat, lo - lon))
        if (i, j + 1) in cells:
            la, lo, _ = cells[(i, j + 1)]
            dj.append((la - lat, lo - lon))
    lat0 = float(np.mean([v[0] for v in cells.values()]))
    dlat = snapshot.cell_size_km / (R_km * DEG)
    dlon = snapshot.cell_size_km / (R_km * np.cos(lat0 * DEG) * DEG)
    # with no neighbour pairs at all the grid orientation is unknown: assume i north, j east
    e_i = np.median(di, axis=0) if di else np.array([dlat, 0.0])
    e_j = np.median(dj, axis=0) if dj else np.array([0.0, dlon])
    return np.asarray(e_i, dtype=float), np.asarray(e_j, dtype=float)


class _CornerEstimator:
    """Lat/lon of cell corners: midpoint toward the diagonal neighbour, else local rectangular grid."""

    def __init__(self, snapshot: Snapshot, R_km: float):
        self.cells = snapshot.cells
        self.snapshot = snapshot
        self.R_km = R_km
        self._fallback = None

    def _center(self, cell) -> np.ndarray:
        lat, lon, _ = self.cells[cell]
        return np.array([lat, lon])

    def _step(self, cell, axis: int) -> np.ndarray:
        i, j = cell
        fwd = (i + 1, j) if axis == 0 else (i, j + 1)
        back = (i - 1, j) if axis == 0 else (i, j - 1)
        if fwd in self.cells:
            return self._center(fwd) - self._center(cell)
        if back in self.cells:
            return self._center(cell) - self._center(back)
        if self._fallback is None:
            self._fallback = _median_steps(self.snapshot, self.R_km)
        return self._fallback[axis]

    def corner(self, cell, di: int, dj: int) -> np.ndarray:
        i, j = cell
        diag = (i + di, j + dj)
        c = self._center(cell)
        if diag in self.cells:
            return 0.5 * (c + self._center(diag))
        return c + 0.5 * di * self._step(cell, 0) + 0.5 * dj * self._step(cell, 1)


def _boundary_loops(cells: frozenset) -> list[list[tuple[int, int]]]:
    """Directed boundary loops on the cell-corner lattice, region on the left.

    Cell (i, j) occupies [i, i+1] x [j, j+1].  At a vertex where two cells touch
    only diagonally the rightmost turn is taken, which keeps 8-connected cells
    in a single loop.  Loops are returned with straight-through vertices dropped.
    """
    edges = []
    for (i, j) in sorted(cells):
        if (i, j - 1) not in cells:
            edges.append(((i, j), (i + 1, j)))
        if (i + 1, j) not in cells:
            edges.append(((i + 1, j), (i + 1, j + 1)))
        if (i, j + 1) not in cells:
            edges.append(((i + 1, j + 1), (i, j + 1)))
        if (i - 1, j) not in cells:
            edges.append(((i, j + 1), (i, j)))
    outgoing: dict = {}
    for k, (s, _) in enumerate(edges):
        outgoing.setdefault(s, []).append(k)

    def direction(k):
        (a0, b0), (a1, b1) = edges[k]
        return (a1 - a0, b1 - b0)

    successor = {}
    for k, (_, end) in enumerate(edges):
        d = direction(k)
        rank = {(d[1], -d[0]): 0, d: 1, (-d[1], d[0]): 2}  # right, straight, left
        successor[k] = min(outgoing[end], key=lambda e: rank.get(direction(e), 3))

    loops = []
    used = set()
    for k0 in range(len(edges)):
        if k0 in used:
            continue
        loop_edges = [k0]
        used.add(k0)
        k = successor[k0]
        while k != k0:
            loop_edges.append(k)
            used.add(k)
            k = successor[k]
        verts = []
        n = len(loop_edges)
        for idx in range(n):
            prev_d = direction(loop_edges[idx - 1])
            d = direction(loop_edges[idx])
            if d != prev_d:
                verts.append(edges[loop_edges[idx]][0])
        loops.append(verts)
    return loops


def _lattice_signed_area(verts) -> float:
    return signed_area(np.array(verts, dtype=float))


def _separate_pinches(xy: np.ndarray, keys: list) -> np.ndarray:
    """Split repeated (pinch) vertices apart by a tiny offset toward the inside of each turn."""
    seen: dict = {}
    for idx, key in enumerate(keys):
        seen.setdefault(key, []).append(idx)
    out = xy.copy()
    k = len(xy)
    for key, occ in seen.items():
        if len(occ) < 2:
            continue
        for idx in occ:
            d_in = xy[idx] - xy[idx - 1]
            d_out = xy[(idx + 1) % k] - xy[idx]
            d_in /= np.hypot(*d_in)
            d_out /= np.hypot(*d_out)
            bend = d_out - d_in
            norm = np.hypot(*bend)
            if norm > 0:
                out[idx] = xy[idx] + PINCH_OFFSET_KM * bend / norm
    return out


def boundary_latlon(cells: frozenset, snapshot: Snapshot, R_km: float = EARTH_RADIUS_KM):
    """Outer boundary vertices of a cell cluster as ``(lat, lon)`` rows plus their lattice keys.

    Interior holes are dropped.  Each lattice corner is placed at the mean of
    the corner estimates of the cluster's cells touching it.
    """
    if not cells:
        raise ValueError("empty cell cluster")
    loops = _boundary_loops(frozenset(cells))
    outer = max(loops, key=_lattice_signed_area)
    est = _CornerEstimator(snapshot, R_km)
    latlon = []
    for (a, b) in outer:
        pts = []
        for i in (a - 1, a):
            for j in (b - 1, b):
                if (i, j) in cells:
                    pts.append(est.corner((i, j), 2 * (a - i) - 1, 2 * (b - j) - 1))
        latlon.append(np.mean(pts, axis=0))
    return np.array(latlon), outer


def boundary_polygon(cells: frozenset, snapshot: Snapshot, R_km: float = EARTH_RADIUS_KM):
    """Projected outer boundary of a cell cluster.

    Returns ``(polygon, bounds)`` where ``bounds`` is the bounding region of the
    boundary contour that defines the planar frame.
    """
    latlon, keys = boundary_latlon(cells, snapshot, R_km)
    bounds = bounding_region(latlon)
    x, y = project(latlon[:, 0], latlon[:, 1], bounds, R_km)
    xy = _separate_pinches(np.column_stack([x, y]), keys)
    return Polygon(xy), bounds


def project_cells(cells: Iterable, snapshot: Snapshot, bounds: BoundingRegion, R_km: float = EARTH_RADIUS_KM) -> np.ndarray:
    """Planar coordinates ``(n, 2)`` of cell centres in the frame of ``bounds``."""
    ll = np.array([snapshot.center(c) for c in sorted(cells)])
    x, y = project(ll[:, 0], ll[:, 1], bounds, R_km)
    return np.column_stack([np.atleast_1d(x), np.atleast_1d(y)])


def attach_geometry(region, snapshot: Snapshot, R_km: float = EARTH_RADIUS_KM):
    """Return a copy of ``region`` with boundary polygon, bounds and area filled in."""
    poly, bounds = boundary_polygon(region.cells, snapshot, R_km)
    return replace(region, boundary=poly, bounds=bounds, area_km2=polygon_area(poly))
