"""The sanity case: on the unit disc every construction collapses to
classical formulas.  The Szego kernel based at the origin is the constant
1/(2 pi), the Garabedian kernel is 1/(2 pi z), the Ahlfors map is the
identity, and the degree-one proper map to the right half plane with its
pole at z = 1 is the Moebius map (1+z)/(1-z).
"""

import numpy as np

from propermaps import (BoundaryPoint, CurveSpec, Domain, ahlfors_map,
                        build_interior, degree, solve_szego_boundary)

disc = Domain([CurveSpec.circle(0, 1.0)], 256)

sol = solve_szego_boundary(disc, 0.0)
print("S(z,0) on |z|=1 is constant:",
      np.max(np.abs(sol.s_boundary - 1 / (2 * np.pi))) < 1e-13)
print("Ahlfors map f_0(0.37) =", ahlfors_map(sol, 0.37), " (identity map)")

gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, c=1.0, C=0.0)
z = np.array([0.2 + 0.4j, -0.5, 0.6j])
print("F(z)/F(0)      :", gmap.interior(z) / gmap.interior(0.0))
print("(1+z)/(1-z)    :", (1 + z) / (1 - z))
print("mapping degree :", degree(gmap))
