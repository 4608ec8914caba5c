"""Turn a region outline into a star-hull radial function.

From the centroid of the convex hull, shoot a ray at each grid angle and keep
the farthest crossing with the outline. The resulting radius r(theta) traces
the star-hull, which fills any notch the rays can't see into.
"""

import numpy as np

from rainshape.geometry import Polygon, polygon_area
from rainshape.starhull import (AngularGrid, GeometryError, directional_error_profile,
                                multi_intersection_measure, radial_function, reference_point,
                                starhull_overall_error)

# A square with a hook cut into its right side: some rays leave and re-enter.
hook = Polygon([(-1, -1), (3, -1), (3, 2), (1.9, 2), (1.9, -0.5), (1, -0.5), (1, 1), (-1, 1)])
grid = AngularGrid(360)

# For this outline the hull centroid falls in the open notch, and some rays
# from it never meet the boundary. That is reported, not patched over.
print("hull centroid:", np.round(reference_point(hook), 3))
try:
    radial_function(hook, grid=grid)
except GeometryError as exc:
    print("default reference point fails:", exc)

# An explicit reference point inside the square works.
rf = radial_function(hook, ref_point=(0.0, 0.0), grid=grid)

print("reference point:", np.round(rf.ref_point, 4))
print(f"outline area {polygon_area(hook):.3f}, star-hull area {rf.area():.3f}")
print(f"overall star-hull error: {starhull_overall_error(hook, rf):.2f}%")
print(f"angle measure of rays with several crossings: {multi_intersection_measure(hook, rf.ref_point, grid):.3f} rad")

err = directional_error_profile(hook, rf)
k = int(np.argmax(err))
print(f"worst direction {np.degrees(grid.thetas[k]):.0f} deg, fraction of ray outside the region {err[k]:.2f}")

# A convex outline is its own star-hull.
disc = Polygon(np.column_stack([np.cos(grid.thetas), np.sin(grid.thetas)]) * 10)
print(f"disc error: {starhull_overall_error(disc, radial_function(disc, grid=grid)):.2e}%")
