import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import ndimage
from scipy.spatial import ConvexHull

from rainshape.geometry import (BoundingRegion, DegenerateGeometryError, Polygon, bounding_region,
                                boundary_polygon, centroid, contains, convex_hull, is_simple,
                                polygon_area, project, project_cells)
from rainshape.regions import label_grid

from _util import snapshot_from_cells, snapshot_from_mask

SQUARE = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def _fan_area(v):
    """Independent oracle: sum of signed triangle areas about an interior-agnostic pivot."""
    v = np.asarray(v, float)
    p0 = v[0]
    total = 0.0
    for a, b in zip(v[1:-1], v[2:]):
        total += 0.5 * ((a[0] - p0[0]) * (b[1] - p0[1]) - (b[0] - p0[0]) * (a[1] - p0[1]))
    return abs(total)


def test_bounding_region_examples():
    assert bounding_region([(21, 84)]) == BoundingRegion(21, 21, 84, 84)
    assert bounding_region([(21, 84), (30, 90)]) == BoundingRegion(21, 30, 84, 90)
    assert bounding_region([(25, 85), (22, 89), (29, 86)]) == BoundingRegion(22, 29, 85, 89)
    with pytest.raises(ValueError):
        bounding_region([])


def test_projection_examples():
    b = BoundingRegion(-1, 1, 9, 11)
    assert project(0.0, 10.0, b) == (0.0, 0.0)
    x, _ = project(0.0, 11.0, b)
    assert x == pytest.approx(6371 * math.pi / 180, abs=1e-9)
    assert x == pytest.approx(111.1949, abs=5e-5)
    b60 = BoundingRegion(59, 61, 9, 11)
    x60, y60 = project(60.0, 11.0, b60)
    assert x60 == pytest.approx(55.5975, abs=5e-5)
    assert y60 == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("cells, area, nvert", [
    ({(0, 0)}, 25.0, 4),
    ({(0, 0), (1, 0)}, 50.0, 4),
    ({(0, 0), (1, 0), (1, 1)}, 75.0, 6),
])
def test_boundary_of_small_clusters(cells, area, nvert):
    snap = snapshot_from_cells(cells, pad=1)
    poly, _ = boundary_polygon(frozenset(cells), snap)
    assert len(poly) == nvert
    assert polygon_area(poly) == pytest.approx(area, rel=1e-6)
    assert is_simple(poly)


def test_two_cell_block_is_5_by_10():
    snap = snapshot_from_cells({(0, 0), (1, 0)})
    poly, _ = boundary_polygon(frozenset({(0, 0), (1, 0)}), snap)
    ext = poly.vertices.max(axis=0) - poly.vertices.min(axis=0)
    assert ext == pytest.approx([5.0, 10.0], rel=1e-6)


def test_plus_pentomino_has_twelve_vertices():
    cells = frozenset({(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)})
    poly, _ = boundary_polygon(cells, snapshot_from_cells(cells))
    assert len(poly) == 12
    assert polygon_area(poly) == pytest.approx(125.0, rel=1e-6)


def test_diagonal_pinch_stays_simple():
    cells = frozenset({(0, 0), (1, 1), (2, 2), (2, 0), (0, 2)})
    poly, _ = boundary_polygon(cells, snapshot_from_cells(cells))
    assert is_simple(poly)
    assert polygon_area(poly) == pytest.approx(125.0, rel=1e-6)


def test_holes_are_filled():
    mask = np.ones((3, 3), bool)
    mask[1, 1] = False
    cells = frozenset(zip(*np.nonzero(mask)))
    poly, _ = boundary_polygon(cells, snapshot_from_mask(mask))
    assert polygon_area(poly) == pytest.approx(225.0, rel=1e-6)


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=25))
def test_boundary_area_counts_cells_when_hole_free(cells):
    cells = frozenset(cells)
    mask = np.zeros((7, 7), bool)
    for c in cells:
        mask[c] = True
    _, n = label_grid(mask)
    assume(n == 1)
    assume(ndimage.binary_fill_holes(mask).sum() == mask.sum())
    poly, bounds = boundary_polygon(cells, snapshot_from_cells(cells))
    assert is_simple(poly)
    assert polygon_area(poly) == pytest.approx(25.0 * len(cells), rel=1e-5)
    centers = project_cells(cells, snapshot_from_cells(cells), bounds)
    assert contains(poly, centers).all()


def test_area_examples():
    assert polygon_area(SQUARE) == 1.0
    assert polygon_area([(0, 0), (5, 0), (5, 5), (0, 5)]) == 25.0
    assert polygon_area([(0, 0), (4, 0), (0, 3)]) == 6.0


def test_centroid_examples():
    assert centroid(SQUARE) == pytest.approx((0.5, 0.5))
    assert centroid([(0, 0), (3, 0), (0, 3)]) == pytest.approx((1, 1))
    assert centroid([(0, 0), (2, 0), (2, 6), (0, 6)]) == pytest.approx((1, 3))


def test_clockwise_input_is_reoriented():
    p = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    x, y = p.vertices.T
    assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0


def test_degenerate_polygons():
    with pytest.raises(DegenerateGeometryError):
        Polygon([(0, 0), (1, 1)])
    with pytest.raises(DegenerateGeometryError):
        Polygon([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(DegenerateGeometryError):
        convex_hull([(0, 0), (1, 1), (2, 2)])


def test_hull_of_square_plus_center():
    hull = convex_hull([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
    assert len(hull) == 4 and polygon_area(hull) == 4.0


def test_hull_of_triangle():
    pts = [(0, 0), (3, 1), (1, 4)]
    assert {tuple(v) for v in convex_hull(pts).vertices} == set(map(tuple, map(lambda p: np.array(p, float), pts)))


def test_hull_of_disc_points_and_corners():
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 1, 100))
    t = rng.uniform(0, 2 * np.pi, 100)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    corners = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], float)
    hull = convex_hull(np.vstack([pts, corners]))
    assert {tuple(v) for v in hull.vertices} == {tuple(c) for c in corners}
    assert contains(hull, pts, tol=1e-12).all()


points = st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=40)


@given(points)
def test_hull_matches_scipy(pts):
    arr = np.unique(np.array(pts), axis=0)
    try:
        ref = ConvexHull(arr)
    except Exception:
        assume(False)
    assume(ref.volume > 1e-6)
    hull = convex_hull(arr)
    assert polygon_area(hull) == pytest.approx(ref.volume, rel=1e-9)
    assert polygon_area(hull) == pytest.approx(_fan_area(hull.vertices), rel=1e-9)
    assert contains(hull, arr, tol=1e-9).all()


@given(st.integers(3, 40), st.floats(0.1, 50))
def test_regular_polygon_area_and_centroid(k, rho):
    t = 2 * np.pi * np.arange(k) / k
    poly = Polygon(np.column_stack([5 + rho * np.cos(t), -3 + rho * np.sin(t)]))
    assert polygon_area(poly) == pytest.approx(0.5 * k * rho ** 2 * np.sin(2 * np.pi / k), rel=1e-9)
    assert centroid(poly) == pytest.approx((5, -3), abs=1e-9 * max(rho, 1))


def test_contains_and_tolerance():
    assert contains(SQUARE, [(0.5, 0.5), (2, 2)]).tolist() == [True, False]
    assert not contains(SQUARE, [(1 + 1e-10, 0.5)])[0]
    assert contains(SQUARE, [(1 + 1e-10, 0.5)], tol=1e-9)[0]


def test_is_simple_detects_bowtie():
    assert not is_simple(Polygon([(0, 0), (2, 2), (2, 0), (0, 2), (-1, 1)]))
    assert is_simple(SQUARE)
