"""Command-line entry point: ``rainshape {extract,fpca,fourier,report,synth}``.

Every subcommand validates its configuration before reading inputs, computes
all outputs in memory and only then writes them, so a failing run leaves no
partial directory behind.  Output files are byte-deterministic for a fixed
input and configuration.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import os
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, fourier, fpca, geometry, ingest, pipeline, starhull, svg, synth
from .normalize import NormalizingMap
from .survival import EstimationError

OUT_ENV = "RAINSHAPE_OUT"
DEFAULT_OUT = "rainshape-out"
EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3

log = logging.getLogger("rainshape")

MANIFEST_COLUMNS = ("contour_id", "pass_id", "group", "area_km2", "starhull_area_km2", "censored",
                    "ref_x", "ref_y", "cell_size_km", "radial", "polygon")


class DataError(RuntimeError):
    """Input that is well-formed configuration-wise but unusable."""


# --- helpers ----------------------------------------------------------------------

def _f(v) -> str:
    return repr(float(v))


def _csv(header: Sequence[str], rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return out.getvalue()


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", text)


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def write_files(root, files: dict) -> None:
    root = Path(root)
    for rel in sorted(files):
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(files[rel])


def _config(args) -> pipeline.PipelineConfig:
    kw = {f.name: getattr(args, f.name) for f in dataclasses.fields(pipeline.PipelineConfig)
          if getattr(args, f.name, None) is not None}
    return pipeline.PipelineConfig(**kw).validate()


def _parse_orders(text: str, grid_m: int) -> list[int]:
    try:
        orders = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise pipeline.ConfigError(f"--orders must be comma-separated integers, got {text!r}") from None
    if not orders or orders[0] < 0 or 2 * orders[-1] + 1 > grid_m:
        raise pipeline.ConfigError("--orders must satisfy 0 <= 2d+1 <= grid_m")
    return orders


# --- manifest I/O -----------------------------------------------------------------

def _polygon_csv(poly: geometry.Polygon) -> str:
    return _csv(("x_km", "y_km"), ([_f(x), _f(y)] for x, y in poly.vertices))


def _read_polygon(path: Path) -> geometry.Polygon:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    return geometry.Polygon(np.array([[float(x), float(y)] for x, y in rows]))


def load_manifest(path, config: pipeline.PipelineConfig, grid_m: Optional[int] = None) -> list[pipeline.Contour]:
    """Contours listed in an ``extract`` manifest, restricted to the configured area range.

    All radial functions must share one grid, of size ``grid_m`` when given.
    """
    path = Path(path)
    base = path.parent
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(MANIFEST_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: manifest lacks columns {sorted(missing)}")
        rows = list(reader)
    out = []
    for row in rows:
        area = float(row["area_km2"])
        if not config.min_area_km2 <= area <= config.max_area_km2:
            continue
        rf = starhull.loads_radial((base / row["radial"]).read_text())
        if grid_m is None:
            grid_m = rf.grid.m
        if rf.grid.m != grid_m:
            raise DataError(f"{row['contour_id']}: radial grid has {rf.grid.m} points, expected {grid_m}")
        out.append(pipeline.Contour(row["contour_id"], row["pass_id"], row["group"],
                                    _read_polygon(base / row["polygon"]), rf, area,
                                    row["censored"] == "true", float(row["cell_size_km"])))
    return out


def _load(args, config):
    """Contours of the manifest plus the config with ``grid_m`` taken from the radial files."""
    contours = load_manifest(args.manifest, config, args.grid_m)
    if not contours:
        raise DataError("no contours in the configured area range")
    return contours, dataclasses.replace(config, grid_m=contours[0].radial.grid.m).validate()


# --- subcommands ------------------------------------------------------------------

def extract_files(contours: Sequence[pipeline.Contour], skipped: Sequence = ()) -> dict:
    """Manifest, radial and polygon files for a list of contours, keyed by relative path."""
    files, rows = {}, []
    for c in contours:
        name = _safe_name(c.contour_id)
        rel_r, rel_p = f"radial/{name}.csv", f"polygons/{name}.csv"
        files[rel_r] = starhull.dumps_radial(c.radial)
        files[rel_p] = _polygon_csv(c.polygon)
        rows.append([c.contour_id, c.pass_id, c.group, _f(c.area_km2), _f(c.starhull_area),
                     "true" if c.censored else "false", _f(c.radial.ref_point[0]), _f(c.radial.ref_point[1]),
                     _f(c.cell_size_km), rel_r, rel_p])
    files["manifest.csv"] = _csv(MANIFEST_COLUMNS, rows)
    files["skipped.csv"] = _csv(("contour_id", "reason"), skipped)
    return files


def cmd_extract(args) -> dict:
    config = _config(args)
    if not args.cell_size_km > 0:
        raise pipeline.ConfigError("--cell-size-km must be positive")
    snaps = ingest.read_snapshots(args.input, cell_size_km=args.cell_size_km)
    skipped: list = []
    contours = pipeline.extract_contours(snaps, config, skipped)
    return extract_files(contours, skipped)


def _polar_xy(radius, grid):
    return radius * np.cos(grid.thetas), radius * np.sin(grid.thetas)


def cmd_fpca(args) -> dict:
    config = _config(args)
    contours, config = _load(args, config)
    ids = [c.contour_id for c in contours]
    res = pipeline.fit_fpca([c.radial for c in contours], config, ids)
    es, J, grid = res.eigensystem, res.n_components, config.grid
    files = {
        "eigensystem.csv": fpca.dumps_eigensystem(es, J),
        "eigenvalues.csv": fpca.dumps_eigenvalues(es.eigenvalues),
        "variance_explained.csv": analysis.table_variance_explained(es.eigenvalues),
        "normalizing_map.csv": res.nmap.dumps(),
        "weights.csv": _csv(("contour_id", "censored", "area_km2", "weight"),
                            ([c.contour_id, "true" if c.censored else "false", _f(c.area_km2), _f(p)]
                             for c, p in zip(contours, res.sample.weights))),
        "selection.csv": _csv(("n_contours", "n_components", "selected_by"),
                              [[len(contours), J, "cv" if res.cv is not None else "config"]]),
    }
    if res.cv is not None:
        files["cv_scores.csv"] = _csv(("J", "cv_error"), ([j + 1, _f(v)] for j, v in enumerate(res.cv)))
    for k in range(1, min(J, args.modes) + 1):
        curves = [res.nmap.invert(fpca.mode_of_variation(es, k, a)) for a in (-1.0, 0.0, 1.0)]
        files[f"modes/mode_{k}.csv"] = _csv(
            ("theta", "g_minus", "g_mean", "g_plus"),
            ([_f(t)] + [_f(c[i]) for c in curves] for i, t in enumerate(grid.thetas)))
        if args.svg:
            series = [(lbl, *_polar_xy(c, grid), True) for lbl, c in zip(("-1", "0", "+1"), curves)]
            files[f"modes/mode_{k}.svg"] = svg.polylines(series, f"mode of variation {k}", equal_aspect=True)
    groups = sorted({c.group for c in contours if c.group})
    if groups:
        by_group = {}
        single = dataclasses.replace(config, fpca_components=1)
        for g in groups:
            members = [k for k, c in enumerate(contours) if c.group == g]
            sub = pipeline.fit_fpca([contours[k].radial for k in members], single,
                                    [ids[k] for k in members], nmap=res.nmap)
            by_group[g] = sub.eigensystem.eigenvalues
        files["group_eigenvalues.csv"] = analysis.table_group_eigenvalues(by_group)
    return files


def _overlay_csv(actual: geometry.Polygon, approx: geometry.Polygon) -> str:
    rows = [["actual", _f(x), _f(y)] for x, y in actual.vertices]
    rows += [["approximation", _f(x), _f(y)] for x, y in approx.vertices]
    return _csv(("series", "x_km", "y_km"), rows)


def cmd_fourier(args) -> dict:
    config = _config(args)
    orders = _parse_orders(args.orders, config.grid_m)
    if args.bins < 1:
        raise pipeline.ConfigError("--bins must be positive")
    contours, config = _load(args, config)
    ids = [c.contour_id for c in contours]
    res = pipeline.fit_fpca([c.radial for c in contours], config, ids)
    d, grid, nmap = config.fourier_order, config.grid, res.nmap
    models = pipeline.fourier_models(res.curves, d)
    files = {"models.csv": fourier.dumps_models(models, ids)}

    amps = fourier.retransformed_amplitudes(models, nmap)
    rows = []
    for i, (counts, edges) in enumerate(fourier.amplitude_histograms(amps, args.bins)):
        rows += [[i, _f(edges[k]), _f(edges[k + 1]), int(counts[k])] for k in range(len(counts))]
    files["amplitude_histograms.csv"] = _csv(("harmonic", "bin_lo", "bin_hi", "count"), rows)

    if d >= 2:
        a2, b2 = fourier.modal_axiality(fourier.harmonic_pairs(models, 2))
        radius, angle = fourier.axiality_contour(a2, b2, nmap, grid)
        files["axiality.csv"] = _csv(("a2", "b2", "diameter_angle_deg"), [[_f(a2), _f(b2), _f(np.degrees(angle))]])
        files["axiality_contour.csv"] = _csv(("theta", "radius"), ([_f(t), _f(r)] for t, r in zip(grid.thetas, radius)))
        if args.svg:
            files["axiality_contour.svg"] = svg.polylines([("axiality", *_polar_xy(radius, grid), True)],
                                                          "modal axiality", equal_aspect=True)

    es = res.eigensystem
    ise_n = [analysis.ise(x, fpca.reconstruct(x, es, res.n_components)) for x in res.curves]
    ise_p = [analysis.ise(x, fourier.evaluate(m, grid.thetas)) for x, m in zip(res.curves, models)]
    files["ise_table.csv"] = analysis.table_ise(ise_n, ise_p)

    errors = {k: pipeline.symdiff_errors(contours, res.curves, nmap, k) for k in sorted(set(orders) | {d})}
    files["symdiff_table.csv"] = analysis.table_symdiff({k: errors[k] for k in orders})
    files["symdiff_errors.csv"] = _csv(["contour_id"] + [f"d_{k}" for k in orders],
                                       ([cid] + [_f(errors[k][n]) for k in orders] for n, cid in enumerate(ids)))

    radii = [pipeline.fourier_radii(m, nmap, grid) for m in models]
    profiles = [analysis.p_theta_profile(c.polygon, r, c.radial.ref_point, grid) for c, r in zip(contours, radii)]
    q = analysis.quartile_curves(profiles)
    files["p_theta_quartiles.csv"] = _csv(("theta", "q25", "q50", "q75"),
                                          ([_f(t)] + [_f(v) for v in q[:, k]] for k, t in enumerate(grid.thetas)))

    if len(contours) >= 3:
        for label, k in zip(("best", "median", "worst"), analysis.best_median_worst(errors[d])):
            approx = pipeline.approximation_polygon(contours[k], radii[k])
            files[f"overlays/{label}.csv"] = _overlay_csv(contours[k].polygon, approx)
            if args.svg:
                series = [("actual", *contours[k].polygon.vertices.T, True), ("approximation", *approx.vertices.T, True)]
                files[f"overlays/{label}.svg"] = svg.polylines(series, f"{label}: {ids[k]}", equal_aspect=True)
    return files


def cmd_report(args) -> dict:
    config = _config(args)
    contours, config = _load(args, config)
    summary = pipeline.starhull_error_summary(contours)
    cols = ("metric", "0%", "25%", "50%", "75%", "100%")
    rows = [[name] + [_f(v) for v in analysis.quartiles(summary[key], with_range=True)]
            for name, key in (("overall_error_pct", "overall_pct"), ("multi_intersection", "multi_measure"))]
    files = {"starhull_error.csv": _csv(cols, rows)}
    grid = config.grid
    if len(summary["directional"]):
        q = analysis.quartile_curves(summary["directional"])
        files["directional_error.csv"] = _csv(("theta", "q25", "q50", "q75"),
                                              ([_f(t)] + [_f(v) for v in q[:, k]] for k, t in enumerate(grid.thetas)))
    radials = [c.radial for c in contours]
    nmap = NormalizingMap.fit(radials, complete_only=config.map_complete_only)
    raw, transformed = pipeline.skewness_before_after(radials, nmap)
    files["skewness.csv"] = _csv(("theta", "raw", "transformed"),
                                 ([_f(t), _f(a), _f(b)] for t, a, b in zip(grid.thetas, raw, transformed)))
    return files


def cmd_synth(args) -> dict:
    try:
        spec = synth.SynthSpec.from_json(Path(args.spec).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {args.spec}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise pipeline.ConfigError(f"invalid synth spec: {exc}") from None
    ds = synth.generate_dataset(spec)
    return {"records.csv": ds.records_csv(), "ledger.csv": ds.ledger_csv(), "spec.json": spec.to_json() + "\n"}


# --- argument parsing -------------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--min-area-km2", dest="min_area_km2", type=float)
    p.add_argument("--max-area-km2", dest="max_area_km2", type=float)
    p.add_argument("--min-rain-rate", dest="min_rain_rate", type=float)
    p.add_argument("--grid-m", dest="grid_m", type=int)
    p.add_argument("--fpca-components", dest="fpca_components", type=int,
                   help="fix J instead of selecting it by cross-validation")
    p.add_argument("--cv-max-components", dest="cv_max_components", type=int)
    p.add_argument("--fourier-order", dest="fourier_order", type=int)
    p.add_argument("--r-km", dest="R_km", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--weights", choices=("km", "uniform"))
    p.add_argument("--map-complete-only", dest="map_complete_only", action="store_true", default=None,
                   help="fit the normalizing map on complete contours only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainshape", description="Shape analysis of rain regions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="regions and radial functions from a pass-record CSV")
    p.add_argument("input")
    p.add_argument("--cell-size-km", dest="cell_size_km", type=float, default=5.0)
    _add_config_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("fpca", help="normalizing map, eigensystem and modes of variation")
    p.add_argument("manifest")
    p.add_argument("--modes", type=int, default=3, help="modes of variation to export")
    p.add_argument("--svg", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_fpca)

    p = sub.add_parser("fourier", help="Fourier models, axiality and reconstruction errors")
    p.add_argument("manifest")
    p.add_argument("--orders", default="6,9,12", help="orders for the symmetric-difference table")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--svg", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("report", help="star-hull errors and skewness profile")
    p.add_argument("manifest")
    _add_config_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="synthetic pass records with a ground-truth ledger")
    p.add_argument("spec", help="JSON file of SynthSpec fields")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.set_defaults(func=cmd_synth)
    return parser


DATA_ERRORS = (DataError, ingest.ParseError, EstimationError, starhull.GeometryError,
               geometry.DegenerateGeometryError, synth.SynthError, OSError, KeyError, ValueError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        files = args.func(args)
    except pipeline.ConfigError as exc:
        print(f"rainshape {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as exc:
        print(f"rainshape {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    root = _out_dir(args)
    write_files(root, files)
    log.info("wrote %d files to %s", len(files), root)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
