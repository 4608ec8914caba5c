"""Synthetic ground truth: rasterized star-shaped regions with known harmonics.

Each region boundary is ``r(theta) = exp(zeta0 + sum_i a_i cos(i theta) + b_i sin(i theta))``
around the region's own origin, so radii are positive and the region is
star-shaped about that origin.  A cell is raining iff its centre lies inside
the curve.  Censored regions are produced by cutting the swath along a
straight line through the region.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .geometry import DEG, EARTH_RADIUS_KM
from .ingest import PassRecord, Snapshot, serialize_records
from .regions import Region, flag_censoring, label_grid


class SynthError(RuntimeError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    n_regions: int = 100
    cell_size_km: float = 5.0
    log_radius_mean: float = 3.2
    log_radius_sd: float = 0.35
    harmonic_sd: tuple = (0.08, 0.12, 0.06, 0.04, 0.03, 0.02)
    harmonic_sd_sin: Optional[tuple] = None
    harmonic_mean_cos: Optional[tuple] = None
    harmonic_mean_sin: Optional[tuple] = None
    censor_fraction: float = 0.0
    seed: int = 0
    lat0: float = 25.0
    lon0: float = 87.0
    margin_cells: int = 2
    n_groups: int = 0
    max_retries: int = 100
    R_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        object.__setattr__(self, "harmonic_sd", tuple(float(v) for v in self.harmonic_sd))
        d = len(self.harmonic_sd)
        for name in ("harmonic_sd_sin", "harmonic_mean_cos", "harmonic_mean_sin"):
            val = getattr(self, name)
            if val is not None:
                val = tuple(float(v) for v in val)
                if len(val) != d:
                    raise ValueError(f"{name} needs {d} entries")
                object.__setattr__(self, name, val)
        if self.n_regions < 0:
            raise ValueError("n_regions must be non-negative")
        if not self.cell_size_km > 0:
            raise ValueError("cell_size_km must be positive")
        if not 0.0 <= self.censor_fraction <= 1.0:
            raise ValueError("censor_fraction must lie in [0, 1]")
        if self.margin_cells < 1:
            raise ValueError("margin_cells must be at least 1")
        if self.log_radius_sd < 0 or any(v < 0 for v in self.harmonic_sd):
            raise ValueError("standard deviations must be non-negative")

    @property
    def d_true(self) -> int:
        return len(self.harmonic_sd)

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        raw = json.loads(text)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown synth spec fields: {sorted(unknown)}")
        return cls(**raw)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class SyntheticRegion:
    region_id: str
    zeta0: float
    a: np.ndarray
    b: np.ndarray
    snapshot: Snapshot
    cells: frozenset
    censored: bool
    true_area: float = field(default=0.0)

    def radius(self, thetas) -> np.ndarray:
        return true_radius(self.zeta0, self.a, self.b, thetas)

    def log_radius(self, thetas) -> np.ndarray:
        return np.log(self.radius(thetas))


def true_radius(zeta0: float, a, b, thetas) -> np.ndarray:
    t = np.asarray(thetas, dtype=float)
    s = np.full(t.shape, float(zeta0))
    for i, (ai, bi) in enumerate(zip(a, b), start=1):
        s = s + ai * np.cos(i * t) + bi * np.sin(i * t)
    return np.exp(s)


def _true_area(zeta0, a, b, m: int = 4096) -> float:
    t = 2 * np.pi * np.arange(m) / m
    r = true_radius(zeta0, a, b, t)
    return 0.5 * float(np.sum(r ** 2)) * 2 * np.pi / m


def _draw_coefficients(spec: SynthSpec, rng: np.random.Generator):
    d = spec.d_true
    sd_a = np.array(spec.harmonic_sd)
    sd_b = np.array(spec.harmonic_sd_sin if spec.harmonic_sd_sin is not None else spec.harmonic_sd)
    mu_a = np.array(spec.harmonic_mean_cos if spec.harmonic_mean_cos is not None else [0.0] * d)
    mu_b = np.array(spec.harmonic_mean_sin if spec.harmonic_mean_sin is not None else [0.0] * d)
    zeta0 = spec.log_radius_mean + spec.log_radius_sd * rng.standard_normal()
    a = mu_a + sd_a * rng.standard_normal(d)
    b = mu_b + sd_b * rng.standard_normal(d)
    return float(zeta0), a, b


def _raster(zeta0, a, b, cs: float) -> frozenset:
    rmax = np.exp(zeta0 + np.sum(np.abs(a)) + np.sum(np.abs(b)))
    k = int(np.ceil(rmax / cs)) + 1
    idx = np.arange(-k, k + 1)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    x, y = jj * cs, ii * cs
    inside = np.hypot(x, y) < true_radius(zeta0, a, b, np.arctan2(y, x))
    return frozenset((int(i), int(j)) for i, j in zip(ii[inside], jj[inside]))


def _single_component(cells) -> bool:
    if not cells:
        return False
    arr = np.array(sorted(cells))
    lo = arr.min(axis=0)
    shape = arr.max(axis=0) - lo + 1
    mask = np.zeros(shape, dtype=bool)
    mask[arr[:, 0] - lo[0], arr[:, 1] - lo[1]] = True
    _, count = label_grid(mask)
    return count == 1


def _latlon(spec: SynthSpec, i: int, j: int) -> tuple[float, float]:
    cs = spec.cell_size_km
    lat = spec.lat0 + i * cs / (spec.R_km * DEG)
    lon = spec.lon0 + j * cs / (spec.R_km * np.cos(lat * DEG) * DEG)
    return float(lat), float(lon)


def _build_snapshot(spec, pass_id, cells, swath, rng, group) -> Snapshot:
    table = {}
    for (i, j) in sorted(swath):
        lat, lon = _latlon(spec, i, j)
        rain = round(float(0.1 + rng.gamma(2.0, 2.0)), 3) if (i, j) in cells else 0.0
        table[(i, j)] = (lat, lon, rain)
    return Snapshot(pass_id, table, cell_size_km=spec.cell_size_km, group=group)


def generate_region(spec: SynthSpec, rng: np.random.Generator, region_id: str = "S00000",
                    censor: bool = False, group: str = "") -> SyntheticRegion:
    """Draw coefficients, rasterize, and embed the region in its own snapshot.

    Draws that rasterize to nothing or to several 8-components are resampled,
    up to ``spec.max_retries`` times.
    """
    cs = spec.cell_size_km
    g = spec.margin_cells
    for _ in range(spec.max_retries):
        zeta0, a, b = _draw_coefficients(spec, rng)
        cells = _raster(zeta0, a, b, cs)
        if not _single_component(cells):
            continue
        arr = np.array(sorted(cells))
        (i0, j0), (i1, j1) = arr.min(axis=0) - g, arr.max(axis=0) + g
        swath = {(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1)}
        kept = cells
        if censor:
            cut = _cut_swath(cells, swath, cs, rng, spec.max_retries)
            if cut is None:
                continue
            kept, swath = cut
        snap = _build_snapshot(spec, region_id, kept, swath, rng, group)
        flagged = flag_censoring(Region(region_id, kept), snap)
        if flagged != censor:
            continue
        return SyntheticRegion(region_id, zeta0, a, b, snap, kept, censor, _true_area(zeta0, a, b))
    raise SynthError(f"could not generate region {region_id} in {spec.max_retries} attempts")


def _cut_swath(cells, swath, cs, rng, tries):
    """Drop every swath position beyond a random straight line through the region."""
    arr = np.array(sorted(cells), dtype=float)
    centers = np.column_stack([arr[:, 1] * cs, arr[:, 0] * cs])
    sw = np.array(sorted(swath))
    sw_xy = np.column_stack([sw[:, 1] * cs, sw[:, 0] * cs])
    for _ in range(tries):
        psi = rng.uniform(0, 2 * np.pi)
        u = np.array([np.cos(psi), np.sin(psi)])
        proj = centers @ u
        c = np.quantile(proj, rng.uniform(0.55, 0.9))
        kept = frozenset(cell for cell, p in zip(sorted(cells), proj) if p <= c)
        if len(kept) == len(cells) or not _single_component(kept):
            continue
        new_swath = {tuple(int(v) for v in s) for s, p in zip(sw, sw_xy @ u) if p <= c}
        return kept, new_swath
    return None


@dataclass
class SynthDataset:
    spec: SynthSpec
    regions: list

    @property
    def snapshots(self) -> list:
        return [r.snapshot for r in self.regions]

    def records(self) -> list:
        out = []
        for snap in self.snapshots:
            for (i, j) in sorted(snap.cells):
                lat, lon, rain = snap.cells[(i, j)]
                out.append(PassRecord(snap.pass_id, i, j, lat, lon, rain, snap.group))
        return out

    def records_csv(self) -> str:
        return serialize_records(self.records())

    def ledger_csv(self) -> str:
        d = self.spec.d_true
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["region_id", "zeta0"] + [f"a_{i}" for i in range(1, d + 1)]
                   + [f"b_{i}" for i in range(1, d + 1)]
                   + ["true_area", "raster_area", "censored_truth"])
        cs2 = self.spec.cell_size_km ** 2
        for r in self.regions:
            w.writerow([r.region_id, repr(r.zeta0)] + [repr(float(v)) for v in r.a]
                       + [repr(float(v)) for v in r.b]
                       + [repr(r.true_area), repr(len(r.cells) * cs2), "true" if r.censored else "false"])
        return out.getvalue()


def generate_dataset(spec: SynthSpec) -> SynthDataset:
    """``spec.n_regions`` regions, each in its own pass, with per-region sub-seeds.

    Exactly ``round(censor_fraction * n_regions)`` regions are censored.
    """
    root = np.random.SeedSequence(spec.seed)
    chooser, *children = root.spawn(spec.n_regions + 1)
    n_cens = int(round(spec.censor_fraction * spec.n_regions))
    censored = set(np.random.default_rng(chooser).permutation(spec.n_regions)[:n_cens].tolist())
    regions = []
    for k, child in enumerate(children):
        group = f"G{k % spec.n_groups:02d}" if spec.n_groups else ""
        regions.append(generate_region(spec, np.random.default_rng(child), f"S{k:05d}",
                                       censor=k in censored, group=group))
    return SynthDataset(spec, regions)
