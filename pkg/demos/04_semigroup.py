"""Higher-degree proper maps as weighted sums of Grunsky maps.

Two degree-two annulus maps sharing the inner marked point combine into a
degree-three map that wraps the outer circle twice around the image circle.
Poles can then be attached one at a time (degree rises by one) and removed
again by solving for constants that cancel exactly one Poisson weight.
A negative coefficient that drives a merged weight negative is rejected
with the violated inequality.
"""

from propermaps import (BoundaryPoint, CurveSpec, Domain, SolverContext,
                        add_point, boundary_multiplicity, build_interior,
                        combine, proper_degree, remove_point)
from propermaps.semigroup import CombineReport

q = 0.5
annulus = Domain([CurveSpec.circle(0, q), CurveSpec.circle(0, 1.0)], 256)
ctx = SolverContext(annulus)

b_inner = BoundaryPoint(1, 0.7)
f1 = build_interior(annulus, [b_inner, BoundaryPoint(2, 0.2)], 0.72, ctx=ctx)
f2 = build_interior(annulus, [b_inner, BoundaryPoint(2, 3.0)], 0.72, ctx=ctx)

pmap = combine([(f1, 1.0), (f2, 1.0)], ctx=ctx)
print("degree of F1 + F2:", proper_degree(pmap))
print("outer-circle multiplicity:", boundary_multiplicity(pmap, 2))

bad = combine([(f1, 1.0), (f2, -1.0)], ctx=ctx)
assert isinstance(bad, CombineReport)
print("negative coefficient rejected:", bad.violations)

beta = BoundaryPoint(1, 2.5)
bigger = add_point(pmap, beta, 1.0, ctx=ctx)
print("after add_point:", proper_degree(bigger), "poles:",
      [(bp.curve, round(bp.t, 3)) for bp in bigger.pole_points()])

smaller, (c0, c) = remove_point(bigger, beta, ctx=ctx)
print("after remove_point:", proper_degree(smaller),
      f" (constants c0={c0}, c={c:.6g})")
