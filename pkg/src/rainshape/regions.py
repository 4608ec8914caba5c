"""Contiguous regions under rainfall: 8-connected labeling, censoring, size filter."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .ingest import Snapshot

NEIGHBORS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Region:
    """A maximal 8-connected cluster of positive-rain cells of one pass.

    ``boundary`` (a `rainshape.geometry.Polygon` in the region's own planar
    frame) and ``area_km2`` are filled in by `rainshape.geometry.attach_geometry`.
    """

    pass_id: str
    cells: frozenset
    censored: bool = False
    boundary: Optional[object] = None
    area_km2: Optional[float] = None
    bounds: Optional[object] = None
    group: str = ""

    def __len__(self):
        return len(self.cells)


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        # smaller label wins so labels stay deterministic
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra


def label_grid(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Two-pass 8-connected labeling of a boolean grid.

    Returns ``(labels, count)`` with background 0 and components numbered
    1..count in raster order of their first cell.
    """
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    provisional = np.zeros(mask.shape, dtype=np.int64)
    uf = _UnionFind()
    uf.make()  # label 0 is background
    for i in range(rows):
        for j in range(cols):
            if not mask[i, j]:
                continue
            # already-visited neighbours in raster order: W, NW, N, NE
            seen = []
            if j > 0 and provisional[i, j - 1]:
                seen.append(provisional[i, j - 1])
            if i > 0:
                for dj in (-1, 0, 1):
                    jj = j + dj
                    if 0 <= jj < cols and provisional[i - 1, jj]:
                        seen.append(provisional[i - 1, jj])
            if not seen:
                provisional[i, j] = uf.make()
            else:
                lab = min(seen)
                for other in seen:
                    lab = uf.union(lab, other)
                provisional[i, j] = lab

    # second pass: resolve to roots, then renumber by first appearance
    labels = np.zeros_like(provisional)
    renumber: dict[int, int] = {}
    for i in range(rows):
        for j in range(cols):
            p = provisional[i, j]
            if p:
                root = uf.find(p)
                if root not in renumber:
                    renumber[root] = len(renumber) + 1
                labels[i, j] = renumber[root]
    return labels, len(renumber)


def extract_regions(snapshot: Snapshot, min_rain_rate: float = 0.0) -> list[Region]:
    """Maximal 8-connected components of the cells with rain rate > ``min_rain_rate``.

    Unobserved positions neither join nor split components.  Regions come out
    in raster order (ascending grid_i, then grid_j) of their first cell, with
    the censoring flag already set.
    """
    positive = snapshot.positive_cells(min_rain_rate)
    if not positive:
        return []
    idx = np.array(sorted(positive))
    i0, j0 = idx.min(axis=0)
    i1, j1 = idx.max(axis=0)
    mask = np.zeros((i1 - i0 + 1, j1 - j0 + 1), dtype=bool)
    mask[idx[:, 0] - i0, idx[:, 1] - j0] = True
    labels, count = label_grid(mask)

    members: list[list] = [[] for _ in range(count)]
    for (ii, jj) in idx:
        members[labels[ii - i0, jj - j0] - 1].append((int(ii), int(jj)))
    regions = []
    for cells in members:
        region = Region(snapshot.pass_id, frozenset(cells), group=snapshot.group)
        regions.append(replace(region, censored=flag_censoring(region, snapshot)))
    return regions


def flag_censoring(region: Region, snapshot: Snapshot) -> bool:
    """True iff some cell of the region has an 8-neighbour outside the observed swath."""
    swath = snapshot.swath
    for (i, j) in region.cells:
        for di, dj in NEIGHBORS_8:
            if (i + di, j + dj) not in swath:
                return True
    return False


def filter_by_area(regions: Sequence[Region], min_km2: float = 200.0, max_km2: float = 13500.0) -> list[Region]:
    """Keep regions with ``min_km2 <= area_km2 <= max_km2`` (closed interval), in order."""
    if min_km2 > max_km2:
        raise ValueError(f"min_km2 ({min_km2}) exceeds max_km2 ({max_km2})")
    out = []
    for r in regions:
        if r.area_km2 is None:
            raise ValueError("region area not computed; call geometry.attach_geometry first")
        if min_km2 <= r.area_km2 <= max_km2:
            out.append(r)
    return out
