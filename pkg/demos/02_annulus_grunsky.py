"""The annulus q < |z| < 1 is the one multiply connected domain where
everything has a closed form, which makes it the main oracle.

The harmonic-measure derivative fields give the period matrix; its solution
weight comes out as a_1 = q exactly.  The resulting degree-two proper map to
the right half plane sends one chosen point of each circle to infinity and
the rest of the boundary to the imaginary axis.
"""

import numpy as np

from propermaps import (BoundaryPoint, CurveSpec, Domain, SolverContext,
                        all_f_prime_fields, build_interior, certify,
                        period_matrix, solve_coefficients)

q = 0.5
annulus = Domain([CurveSpec.circle(0, q), CurveSpec.circle(0, 1.0)], 256)
ctx = SolverContext(annulus)

fields = ctx.f_prime_fields
nodes = annulus.flat_nodes()
print("F_1' matches 1/(z ln q):",
      np.max(np.abs(fields[0].samples - 1 / (nodes * np.log(q)))) < 1e-8)

marked = [BoundaryPoint(1, 0.7), BoundaryPoint(2, 0.2)]
pm = period_matrix(fields, marked)
print("period matrix:\n", pm.values)
print("weights (expect a_1 = q):", solve_coefficients(pm).weights)

gmap = build_interior(annulus, marked, 0.72, ctx=ctx)
report = certify(gmap)
print("degree:", report.degree, " multiplicities:", report.multiplicities)
print("boundary |Re F| residual (scale-free):", report.boundary_residual)
print("certified:", report.passed())
