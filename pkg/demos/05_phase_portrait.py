"""Render a Grunsky map: CSV table of grid values plus a PPM phase portrait
of the disc image (hue = argument, brightness clipped by modulus).  The two
marked points show up as the spots where all colors meet on the boundary.

Writes annulus_grid.csv and annulus_portrait.ppm into the working directory.
"""

from propermaps import BoundaryPoint, CurveSpec, Domain, build_interior
from propermaps.portrait import write_grid_csv, write_phase_portrait

q = 0.5
annulus = Domain([CurveSpec.circle(0, q), CurveSpec.circle(0, 1.0)], 256)
gmap = build_interior(annulus, [BoundaryPoint(1, 0.7), BoundaryPoint(2, 0.2)],
                      0.72)

write_grid_csv("annulus_grid.csv", gmap, 96, 96)
write_phase_portrait("annulus_portrait.ppm", gmap, 192, 192)
print("wrote annulus_grid.csv and annulus_portrait.ppm")
