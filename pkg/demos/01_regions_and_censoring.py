"""Find rain regions in one snapshot and see which ones touch the swath edge.

A region is a cluster of rainy cells joined through any of the 8 neighbours.
If one of its cells borders a cell the satellite never observed, we can't
know its full extent, so it is flagged as censored.
"""

import numpy as np

from rainshape import Snapshot, extract_regions
from rainshape.geometry import attach_geometry

rng = np.random.default_rng(1)

# A 30 x 40 swath of 5 km cells near the equator, with three rain blobs.
rain = np.zeros((30, 40))
rain[5:12, 6:14] = 3.0                  # well inside the swath
rain[18:26, 20:27] = 1.5
rain[0:6, 30:38] = 7.0                  # runs into the top edge -> censored
rain[19, 21] = 0.0                      # a hole does not split a region
rain += (rng.random(rain.shape) < 0.01) * 0.4   # scattered drizzle

cells = {}
for (i, j), r in np.ndenumerate(rain):
    cells[(i, j)] = (i * 5 / 111.2, j * 5 / 111.2, float(r))
snap = Snapshot("demo-pass", cells, cell_size_km=5.0)

regions = [attach_geometry(r, snap) for r in extract_regions(snap)]
print(f"{len(regions)} regions in the swath")
for r in sorted(regions, key=lambda r: -r.area_km2)[:5]:
    print(f"  {len(r.cells):3d} cells  {r.area_km2:8.1f} km^2  censored={r.censored}")

# Raising the rain-rate threshold drops the drizzle.
print("above 1 mm/h:", len(extract_regions(snap, min_rain_rate=1.0)), "regions")
