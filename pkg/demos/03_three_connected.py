"""A three-connected domain: two circular holes inside an ellipse.

No closed forms exist here, so the checks are structural: the Szego kernel
based at an admissible interior point has exactly two simple zeros, the
Ahlfors map is a three-to-one branched covering of the disc, and the Grunsky
map through any choice of one marked point per curve is a three-to-one
proper map to the half plane whose two independent constructions agree up to
the allowed gauge.
"""

import numpy as np

from propermaps import (BoundaryPoint, CurveSpec, Domain, SolverContext,
                        build_boundary, build_interior, certify, primitive_pair,
                        solve_szego_boundary)
from propermaps.szego import ahlfors_degree, interior_grid

domain = Domain([CurveSpec.circle(-1.0, 0.35), CurveSpec.circle(1.0, 0.4),
                 CurveSpec.ellipse(0, 2.4, 1.8)], 256)
ctx = SolverContext(domain)

sol = solve_szego_boundary(domain, 0.1 + 0.9j, kmat=ctx.kmat)
print("zeros of S(., a):", np.round(sol.zeros, 6))
print("Ahlfors covering degree:", ahlfors_degree(sol, w0=0.25 + 0.15j))

marked = [BoundaryPoint(1, 0.3), BoundaryPoint(2, 2.0), BoundaryPoint(3, 4.4)]
gmap = build_interior(domain, marked, 0.1 + 0.9j, ctx=ctx)
report = certify(gmap)
print("Grunsky map degree:", report.degree, " residual:", report.boundary_residual)

other = build_boundary(domain, marked, BoundaryPoint(3, 1.0), ctx=ctx)
pts = interior_grid(domain, 12, seed=1)
gap = np.max(np.abs(gmap.interior(pts) - other.interior(pts)))
print("interior-base vs boundary-base construction gap:", gap)

partner, cert = primitive_pair(domain, gmap, ctx=ctx, seed=4)
print("primitive pair separation:", cert.min_separation, " ok:", cert.separated)
