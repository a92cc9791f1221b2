"""Proper holomorphic maps of arbitrary degree as Grunsky-map combinations.

The real part of a valid combination decomposes into positive point masses at
the merged marked points, one mass per pole; validity is exactly positivity
of the merged weights plus coverage of every boundary curve.  The weights are
tracked symbolically from each term's canonical coefficients (scaled by its
gauge), so no potential-theoretic quantity is ever evaluated.
"""

from dataclasses import dataclass, field

import numpy as np

from .fourier import trig_interp
from .geom import BoundaryPoint
from .grunsky import GrunskyError, GrunskyMap, SolverContext, build_interior, cayley
from .grunsky import degree as map_degree
from .szego import DegenerateBasePointError, solve_at_points

TWO_PI = 2.0 * np.pi
MERGE_TOL = 1e-9            # same curve, |dt| below this merges two points


class SemigroupError(ValueError):
    pass


def _merge_key(bp: BoundaryPoint):
    return (bp.curve, round(bp.t / MERGE_TOL))


@dataclass
class CombineReport:
    weights: list                    # [(BoundaryPoint, merged weight)]
    valid: bool
    violations: list = field(default_factory=list)


@dataclass
class ProperMap:
    """Linear combination sum c_k F_k with its Poisson-weight decomposition."""

    domain: object
    terms: list                      # [(GrunskyMap, float)]
    decomposition: list              # [(BoundaryPoint, positive weight)]
    ctx: SolverContext = None

    @property
    def target_degree(self):
        return len(self.decomposition)

    def pole_points(self):
        return [bp for bp, _ in self.decomposition]

    def interior(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        kmat = self.terms[0][0].kmat
        fields = solve_at_points(kmat, z_arr)
        vals = np.zeros(len(z_arr), dtype=complex)
        for gmap, ck in self.terms:
            vals += ck * gmap.interior_from_fields(z_arr, fields)
        return vals if np.ndim(z) else complex(vals[0])

    def __call__(self, z):
        return self.interior(z)

    def boundary_nodes(self):
        vals = 0.0 + 0.0j
        for gmap, ck in self.terms:
            vals = vals + ck * gmap.boundary_nodes()
        return vals

    def boundary_point(self, bp: BoundaryPoint):
        return complex(sum(ck * gmap.boundary_point(bp) for gmap, ck in self.terms))

    def exclusion_mask(self, half_width=0.2):
        d = self.domain
        n = d.nodes_per_curve
        mask = np.ones(d.n_curves * n, dtype=bool)
        for bp in self.pole_points():
            delta = np.abs((d.t_nodes - bp.t + np.pi) % TWO_PI - np.pi)
            mask[(bp.curve - 1) * n: bp.curve * n] &= delta > half_width
        return mask

    def near_pole(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        locs = np.array([self.domain.point_and_tangent(bp)[0]
                         for bp in self.pole_points()])
        spacing = self.domain.node_spacing()
        dist = np.min(np.abs(z_arr[:, None] - locs[None, :]), axis=1)
        return dist < 3.0 * spacing


def merged_weights(terms):
    """Merge the per-term Poisson weights at coincident marked points."""
    table = {}
    for gmap, ck in terms:
        wts = gmap.poisson_weights()
        for j, bp in enumerate(gmap.marked):
            key = _merge_key(bp)
            if key in table:
                old_bp, old_w = table[key]
                table[key] = (old_bp, old_w + ck * wts[j])
            else:
                table[key] = (bp, ck * wts[j])
    return sorted(table.values(), key=lambda item: (item[0].curve, item[0].t))


def combine(terms, ctx=None):
    """Combine weighted Grunsky maps; a ProperMap if valid, else a report."""
    if not terms:
        raise SemigroupError("empty term list")
    domain = terms[0][0].domain
    dh = domain.content_hash()
    for gmap, _ in terms:
        if gmap.domain.content_hash() != dh:
            raise SemigroupError("terms live on different domains")

    weights = merged_weights(terms)
    scale = max(abs(w) for _, w in weights)
    kept, violations = [], []
    for bp, w in weights:
        if w > 1e-12 * scale:
            kept.append((bp, w))
        elif abs(w) <= 1e-12 * scale:
            continue                      # removed pole (zero weight)
        else:
            violations.append(
                f"nonpositive merged weight {w:.6g} at curve {bp.curve}, t={bp.t:.6g}")
    covered = {bp.curve for bp, _ in kept}
    for j in range(1, domain.n_curves + 1):
        if j not in covered:
            violations.append(f"curve {j} has no marked point")
    report = CombineReport(weights=weights, valid=not violations,
                           violations=violations)
    if violations:
        return report
    if ctx is None:
        ctx = getattr(terms[0][0], "ctx", None)
    return ProperMap(domain=domain, terms=list(terms), decomposition=kept, ctx=ctx)


def _default_base(ctx: SolverContext, seed=11, retries=5):
    """An admissible interior base point, jittered if degenerate."""
    domain = ctx.domain
    anchor = domain.interior_anchor()
    rng = np.random.default_rng(seed)
    z = anchor
    for attempt in range(retries):
        try:
            from .szego import solve_szego_boundary
            solve_szego_boundary(domain, z, kmat=ctx.kmat)
            return z
        except DegenerateBasePointError:
            jitter = 0.05 * domain.diameter * (rng.standard_normal()
                                               + 1j * rng.standard_normal())
            z = anchor + jitter
    raise SemigroupError("no admissible base point found after jittered retries")


def add_point(pmap: ProperMap, beta: BoundaryPoint, c3, ctx=None):
    """Attach one more boundary pole: degree rises by exactly one."""
    if c3 <= 0:
        raise SemigroupError("the new coefficient must be positive")
    ctx = ctx or pmap.ctx or SolverContext(pmap.domain)
    key = _merge_key(beta)
    if any(_merge_key(bp) == key for bp in pmap.pole_points()):
        raise SemigroupError("beta coincides with an existing decomposition point")

    per_curve = {}
    for bp, _ in pmap.decomposition:
        cur = per_curve.get(bp.curve)
        if cur is None or bp.t < cur.t:
            per_curve[bp.curve] = bp
    per_curve[beta.curve] = beta
    marked = [per_curve[j] for j in sorted(per_curve)]
    new_map = build_interior(pmap.domain, marked, _default_base(ctx), ctx=ctx)
    result = combine(pmap.terms + [(new_map, float(c3))], ctx=ctx)
    if isinstance(result, CombineReport):
        raise SemigroupError(f"add_point produced an invalid map: {result.violations}")
    return result


def grunsky_through(domain, points, ctx):
    """Grunsky map whose poles are the given one-per-curve boundary points."""
    return build_interior(domain, points, _default_base(ctx), ctx=ctx)


def proper_map_through(domain, points, ctx):
    """A valid proper map with exactly the given pole set (>= 1 per curve)."""
    per_curve = {}
    for bp in points:
        per_curve.setdefault(bp.curve, []).append(bp)
    for j in range(1, domain.n_curves + 1):
        if j not in per_curve:
            raise SemigroupError(f"curve {j} has no point in the pole set")
    base_points = [sorted(per_curve[j], key=lambda bp: bp.t)[0]
                   for j in sorted(per_curve)]
    pmap = combine([(grunsky_through(domain, base_points, ctx), 1.0)], ctx=ctx)
    for j in sorted(per_curve):
        for bp in sorted(per_curve[j], key=lambda bp: bp.t)[1:]:
            pmap = add_point(pmap, bp, 1.0, ctx=ctx)
    return pmap


def remove_point(pmap: ProperMap, b_k: BoundaryPoint, ctx=None, max_doublings=60):
    """Drop one pole from a proper map; degree falls by exactly one.

    Builds the auxiliary map with the reduced pole set and the Grunsky map
    through b_k, then picks constants so the b_k weight cancels exactly while
    every other merged weight stays positive (doubling search on c0).
    """
    ctx = ctx or pmap.ctx or SolverContext(pmap.domain)
    key = _merge_key(b_k)
    decomposition = dict((_merge_key(bp), (bp, w)) for bp, w in pmap.decomposition)
    if key not in decomposition:
        raise SemigroupError("b_k is not a decomposition point of the map")
    b_k = decomposition[key][0]
    same_curve = [bp for bp, _ in pmap.decomposition if bp.curve == b_k.curve]
    if len(same_curve) < 2:
        raise SemigroupError(
            f"curve {b_k.curve} carries only one decomposition point; "
            "removing it would uncover the curve")

    reduced_points = [bp for bp, _ in pmap.decomposition if _merge_key(bp) != key]
    f0 = proper_map_through(pmap.domain, reduced_points, ctx)

    per_curve = {}
    for bp, _ in pmap.decomposition:
        cur = per_curve.get(bp.curve)
        if cur is None or bp.t < cur.t:
            per_curve[bp.curve] = bp
    per_curve[b_k.curve] = b_k
    f_marked = [per_curve[j] for j in sorted(per_curve)]
    f_map = grunsky_through(pmap.domain, f_marked, ctx)

    w_f = dict((_merge_key(bp), f_map.poisson_weights()[j])
               for j, bp in enumerate(f_map.marked))
    c = decomposition[key][1] / w_f[key]
    if c <= 0:
        raise SemigroupError("derived constant c is not positive")

    c0 = 1.0
    for _ in range(max_doublings):
        terms = pmap.terms + [(t, c0 * ck) for t, ck in f0.terms] + [(f_map, -c)]
        result = combine(terms, ctx=ctx)
        if isinstance(result, ProperMap):
            if any(_merge_key(bp) == key for bp in result.pole_points()):
                raise SemigroupError("b_k weight failed to cancel")
            return result, (c0, c)
        c0 *= 2.0
    raise SemigroupError(
        f"no feasible c0 after {max_doublings} doublings; last report: "
        f"{result.violations}")


def _pole_points(pmap):
    if hasattr(pmap, "pole_points"):
        return pmap.pole_points()
    return pmap.pole_set()


def boundary_multiplicity(pmap, j):
    """How many times the map wraps curve j around the target boundary.

    Counted as the winding of the Cayley image of the boundary samples about
    the origin (the poles pass continuously through the point 1), and
    cross-checked against the decomposition count on the curve.
    """
    domain = pmap.domain
    if not 1 <= j <= domain.n_curves:
        raise SemigroupError(f"curve index {j} out of range")
    n = domain.nodes_per_curve
    vals = np.asarray(pmap.boundary_nodes()).reshape(domain.n_curves, n)[j - 1]
    disc = np.empty(n, dtype=complex)
    finite = np.isfinite(vals)
    disc[finite] = cayley(vals[finite])
    disc[~finite] = 1.0                 # poles map to 1 on the circle
    if domain.orientation[j - 1] < 0:
        disc = disc[::-1]
    steps = np.angle(np.roll(disc, -1) / disc)  # increments around the loop
    winding = float(np.sum(steps) / TWO_PI)
    m = int(np.round(winding))
    if abs(winding - m) > 1e-2:
        raise SemigroupError(
            f"boundary winding {winding} is not close to an integer; increase N")
    expected = sum(1 for bp in _pole_points(pmap) if bp.curve == j)
    if m != expected:
        raise SemigroupError(
            f"winding {m} disagrees with decomposition count {expected} on curve {j}")
    return m


def proper_degree(pmap, w0=None):
    """Argument-principle degree (shares the Grunsky-map contour machinery)."""
    return map_degree(pmap, w0=w0)
