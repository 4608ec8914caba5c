"""End-to-end orchestration: snapshots -> contours -> transform -> FPCA / Fourier."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analysis, fourier, fpca, geometry, regions, starhull
from .normalize import NormalizingMap, skewness_profile
from .survival import SizeObservation, kaplan_meier_weights

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    min_area_km2: float = 200.0
    max_area_km2: float = 13500.0
    min_rain_rate: float = 0.0
    grid_m: int = starhull.DEFAULT_GRID_SIZE
    fpca_components: Optional[int] = None
    cv_max_components: int = 20
    fourier_order: int = fourier.DEFAULT_ORDER
    R_km: float = geometry.EARTH_RADIUS_KM
    seed: int = 0
    weights: str = "km"
    map_complete_only: bool = False

    def validate(self) -> "PipelineConfig":
        if not (self.min_area_km2 > 0 and self.max_area_km2 > 0):
            raise ConfigError("area thresholds must be positive")
        if self.min_area_km2 > self.max_area_km2:
            raise ConfigError("min_area_km2 exceeds max_area_km2")
        if self.min_rain_rate < 0:
            raise ConfigError("min_rain_rate must be non-negative")
        if self.grid_m < 4:
            raise ConfigError("grid_m must be at least 4")
        if self.fpca_components is not None and self.fpca_components < 1:
            raise ConfigError("fpca_components must be positive")
        if self.cv_max_components < 1:
            raise ConfigError("cv_max_components must be positive")
        if self.fourier_order < 0 or 2 * self.fourier_order + 1 > self.grid_m:
            raise ConfigError("fourier_order must satisfy 0 <= 2d+1 <= grid_m")
        if not self.R_km > 0:
            raise ConfigError("R_km must be positive")
        if self.weights not in ("km", "uniform"):
            raise ConfigError("weights must be 'km' or 'uniform'")
        return self

    @property
    def grid(self) -> starhull.AngularGrid:
        return starhull.AngularGrid(self.grid_m)


@dataclass
class Contour:
    contour_id: str
    pass_id: str
    group: str
    polygon: geometry.Polygon
    radial: starhull.RadialFunction
    area_km2: float
    censored: bool
    cell_size_km: float = 5.0
    cell_centers: Optional[np.ndarray] = None

    @property
    def starhull_area(self) -> float:
        return self.radial.area()


def contours_from_snapshot(snapshot, config: PipelineConfig, skipped: Optional[list] = None) -> list[Contour]:
    grid = config.grid
    out = []
    found = regions.extract_regions(snapshot, config.min_rain_rate)
    with_geom = [geometry.attach_geometry(r, snapshot, config.R_km) for r in found]
    index = {r.cells: k for k, r in enumerate(with_geom)}
    for reg in regions.filter_by_area(with_geom, config.min_area_km2, config.max_area_km2):
        cid = f"{snapshot.pass_id}-{index[reg.cells]:03d}"
        try:
            rf = starhull.radial_function(reg.boundary, grid=grid, censored=reg.censored, pass_id=reg.pass_id)
        except (starhull.GeometryError, geometry.DegenerateGeometryError) as exc:
            log.warning("skipping %s: %s", cid, exc)
            if skipped is not None:
                skipped.append((cid, str(exc)))
            continue
        centers = geometry.project_cells(reg.cells, snapshot, reg.bounds, config.R_km)
        out.append(Contour(cid, reg.pass_id, reg.group, reg.boundary, rf, reg.area_km2,
                           reg.censored, snapshot.cell_size_km, centers))
    return out


def extract_contours(snapshots: Sequence, config: PipelineConfig, skipped: Optional[list] = None) -> list[Contour]:
    """Regions of every snapshot that pass the size filter, with their radial functions."""
    config.validate()
    out = []
    for snap in snapshots:
        out.extend(contours_from_snapshot(snap, config, skipped))
    return out


@dataclass
class FPCAResult:
    nmap: NormalizingMap
    sample: fpca.FunctionalSample
    eigensystem: fpca.EigenSystem
    n_components: int
    cv: Optional[np.ndarray] = None

    @property
    def curves(self) -> np.ndarray:
        return self.sample.curves


def size_weights(radials, areas=None, weights: str = "km") -> np.ndarray:
    """Kaplan-Meier masses on star-hull areas, or uniform weights."""
    n = len(radials)
    if weights == "uniform":
        return np.full(n, 1.0 / n)
    areas = [rf.area() for rf in radials] if areas is None else areas
    obs = [SizeObservation(float(a), bool(rf.censored), str(k)) for k, (rf, a) in enumerate(zip(radials, areas))]
    return np.asarray(kaplan_meier_weights(obs).weights)


def fit_fpca(radials: Sequence[starhull.RadialFunction], config: PipelineConfig,
             contour_ids: Optional[Sequence[str]] = None, nmap: Optional[NormalizingMap] = None) -> FPCAResult:
    """Transform radial functions to the normal scale and run (weighted) FPCA."""
    config.validate()
    if not radials:
        raise ValueError("no contours to analyse")
    if nmap is None:
        nmap = NormalizingMap.fit(radials, complete_only=config.map_complete_only)
    curves = nmap.transform(radials)
    p = size_weights(radials, weights=config.weights)
    censored = np.array([rf.censored for rf in radials])
    sample = fpca.FunctionalSample(radials[0].grid, curves, p, contour_ids, censored)
    es = fpca.fit_eigensystem(sample)
    cv = None
    if config.fpca_components is None:
        if sample.n >= 3:
            cv = fpca.cv_scores(sample, j_max=config.cv_max_components)
            best = cv.min()
            J = int(np.nonzero(cv <= best + 1e-12 * max(abs(best), 1e-300))[0][0]) + 1
        else:
            J = 1
    else:
        J = config.fpca_components
    J = min(J, es.n_components)
    return FPCAResult(nmap, sample, es, J, cv)


def fourier_models(curves: np.ndarray, d: int) -> list[fourier.FourierModel]:
    grid = starhull.AngularGrid(curves.shape[1])
    return [fourier.fit_fourier(c, d, grid) for c in curves]


def fourier_radii(model: fourier.FourierModel, nmap: NormalizingMap, grid: starhull.AngularGrid) -> np.ndarray:
    """Re-transformed radius g(sum_i C_i cos(i (theta - phi_i))) on the grid."""
    return nmap.invert(fourier.evaluate(fourier.to_polar(model), grid.thetas))


def approximation_polygon(contour: Contour, radii) -> geometry.Polygon:
    return analysis.star_polygon(radii, contour.radial.ref_point, contour.radial.grid)


def symdiff_errors(contours: Sequence[Contour], curves: np.ndarray, nmap: NormalizingMap, d: int,
                   oversample: int = 10) -> np.ndarray:
    grid = contours[0].radial.grid
    out = np.empty(len(contours))
    for k, (c, curve) in enumerate(zip(contours, curves)):
        radii = fourier_radii(fourier.fit_fourier(curve, d, grid), nmap, grid)
        out[k] = analysis.symmetric_difference_error(c.polygon, approximation_polygon(c, radii),
                                                     c.cell_size_km, oversample)
    return out


def starhull_error_summary(contours: Sequence[Contour]) -> dict:
    """Overall error, multiple-intersection measure and per-direction error of complete contours."""
    complete = [c for c in contours if not c.censored]
    overall = np.array([starhull.starhull_overall_error(c.polygon, c.radial) for c in complete])
    multi = np.array([starhull.multi_intersection_measure(c.polygon, c.radial.ref_point, c.radial.grid)
                      for c in complete])
    directional = np.array([starhull.directional_error_profile(c.polygon, c.radial) for c in complete])
    return {"overall_pct": overall, "multi_measure": multi, "directional": directional}


def skewness_before_after(radials, nmap: NormalizingMap) -> tuple[np.ndarray, np.ndarray]:
    raw = np.vstack([rf.values for rf in radials])
    return skewness_profile(raw), skewness_profile(nmap.apply(raw))
