"""Grunsky maps: n-to-one proper holomorphic maps onto the right half plane.

A map is assembled from Szego/Garabedian kernel data at the marked boundary
points b_1..b_n (one per curve) and a base point, with the positive weights
coming from the period system.  Interior evaluation bases one kernel solve at
each evaluation point and reads the marked points off by trigonometric
interpolation; boundary values use the pole-stripped fields based at the b_j.
"""

from dataclasses import dataclass, field

import numpy as np

from .fourier import trig_interp
from .geom import BoundaryPoint, Domain
from .harmonic import HarmonicSystem, all_f_prime_fields
from .periods import period_matrix, solve_coefficients
from .szego import (BoundaryBaseSolution, KernelMatrix, SzegoError, SzegoSolution,
                    cauchy_transform, garabedian_inverse_interior, solve_at_points,
                    solve_boundary_base, solve_szego_boundary)

TWO_PI = 2.0 * np.pi


class GrunskyError(ValueError):
    pass


class SolverContext:
    """Shared per-domain factorizations and derivative fields."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self._kmat = None
        self._fields = None

    @property
    def kmat(self):
        if self._kmat is None:
            self._kmat = KernelMatrix(self.domain)
        return self._kmat

    @property
    def f_prime_fields(self):
        if self._fields is None:
            self._fields = all_f_prime_fields(self.domain, HarmonicSystem(self.domain))
        return self._fields

    def coefficients(self, marked):
        pm = period_matrix(self.f_prime_fields, marked)
        return solve_coefficients(pm).weights


@dataclass
class MapSample:
    point: complex
    rhp: complex
    disc: complex
    near_pole: bool


def cayley(w):
    """(w - 1)/(w + 1), stable for large |w| (infinity maps to 1)."""
    w = np.asarray(w, dtype=complex)
    big = np.abs(w) > 1.0
    out = np.empty_like(w)
    small = ~big
    out[small] = (w[small] - 1.0) / (w[small] + 1.0)
    inv = 1.0 / w[big]
    out[big] = (1.0 - inv) / (1.0 + inv)
    return out if out.ndim else complex(out)


@dataclass
class GrunskyMap:
    """Evaluator for F = c * (sum of kernel terms) + iC."""

    domain: Domain
    kmat: KernelMatrix
    marked: list                      # BoundaryPoint per curve, curve order
    weights: np.ndarray               # positive a_j, a_n = 1
    base_kind: str                    # "interior" or "boundary"
    base: object                      # SzegoSolution or BoundaryBaseSolution
    bfields: list                     # BoundaryBaseSolution per marked point
    l_at_marked: np.ndarray           # L(b_j, base)
    constant_term: float              # sum a_j |S(b_j,a)|^2 / S(a,a), 0 for boundary base
    scale: float = 1.0
    shift: float = 0.0
    gauge_point: complex = None
    marked_locations: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.marked_locations is None:
            self.marked_locations = np.array(
                [self.domain.point_and_tangent(bp)[0] for bp in self.marked])

    # -- raw kernel combination (without gauge) ---------------------------

    def _base_inv_l_interior(self, z_arr):
        if self.base_kind == "interior":
            return garabedian_inverse_interior(self.base, z_arr)
        return 1.0 / self.base.l_interior(z_arr)

    def _raw_from_fields(self, z_arr, fields):
        n = self.domain.nodes_per_curve
        total = np.zeros(len(z_arr), dtype=complex)
        inv_l = self._base_inv_l_interior(z_arr)
        for j, bp in enumerate(self.marked):
            block = fields[(bp.curve - 1) * n: bp.curve * n, :].T
            s_zb = np.conj(trig_interp(block, bp.t))
            total += 2.0 * self.weights[j] * s_zb * self.l_at_marked[j] * inv_l
        return total + self.constant_term

    def raw_interior(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        fields = solve_at_points(self.kmat, z_arr)
        return self._raw_from_fields(z_arr, fields)

    def raw_boundary_nodes(self):
        """Values at the nodes; inf/nan at nodes coincident with a pole."""
        if self.base_kind == "interior":
            l_base = self.base.l_boundary
        else:
            l_base = self.base.l_samples()
        total = np.zeros(len(l_base), dtype=complex)
        with np.errstate(invalid="ignore", divide="ignore"):
            for j, bb in enumerate(self.bfields):
                total += (2.0 * self.weights[j] * self.l_at_marked[j]
                          * bb.s_samples() / l_base)
        return total + self.constant_term

    def raw_boundary_point(self, bp: BoundaryPoint):
        if self.base_kind == "interior":
            inv_l = 1.0 / self.base.l_at_boundary_point(bp)
        else:
            inv_l = self.base.inv_l_at_boundary_point(bp)
        total = 0.0 + 0.0j
        for j, bb in enumerate(self.bfields):
            total += (2.0 * self.weights[j] * self.l_at_marked[j]
                      * bb.s_at_boundary_point(bp) * inv_l)
        return total + self.constant_term

    # -- gauged values -----------------------------------------------------

    def __call__(self, z):
        return self.interior(z)

    def interior(self, z):
        vals = self.scale * self.raw_interior(z) + 1j * self.shift
        return vals if np.ndim(z) else complex(vals[0])

    def interior_from_fields(self, z_arr, fields):
        return self.scale * self._raw_from_fields(z_arr, fields) + 1j * self.shift

    def boundary_nodes(self):
        with np.errstate(invalid="ignore"):
            return self.scale * self.raw_boundary_nodes() + 1j * self.shift

    def boundary_point(self, bp: BoundaryPoint):
        return self.scale * self.raw_boundary_point(bp) + 1j * self.shift

    def pole_set(self):
        return list(self.marked)

    def poisson_weights(self):
        """Canonical decomposition weights of Re F (gauge scale included)."""
        return self.scale * self.weights

    def near_pole(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        spacing = self.domain.node_spacing()
        d = np.min(np.abs(z_arr[:, None] - self.marked_locations[None, :]), axis=1)
        return d < 3.0 * spacing

    def exclusion_mask(self, half_width=0.2):
        """Boundary-node mask excluding arcs around each marked point."""
        d = self.domain
        n = d.nodes_per_curve
        mask = np.ones(d.n_curves * n, dtype=bool)
        for bp in self.marked:
            t = d.t_nodes
            delta = np.abs((t - bp.t + np.pi) % TWO_PI - np.pi)
            mask[(bp.curve - 1) * n: bp.curve * n] &= delta > half_width
        return mask


def evaluate(gmap: GrunskyMap, z):
    """MapSample at an interior point or a BoundaryPoint."""
    if isinstance(z, BoundaryPoint):
        loc, _ = gmap.domain.point_and_tangent(z)
        w = gmap.boundary_point(z)
        return MapSample(point=complex(loc), rhp=complex(w),
                         disc=complex(cayley(np.array(w))),
                         near_pole=bool(gmap.near_pole(loc)[0]))
    z = complex(z)
    if not gmap.domain.contains(z):
        raise GrunskyError(f"{z} is outside the domain")
    w = gmap.interior(z)
    return MapSample(point=z, rhp=complex(w), disc=complex(cayley(np.array(w))),
                     near_pole=bool(gmap.near_pole(z)[0]))


def _checked_marked(domain, marked):
    marked = sorted(marked, key=lambda bp: bp.curve)
    if [bp.curve for bp in marked] != list(range(1, domain.n_curves + 1)):
        missing = set(range(1, domain.n_curves + 1)) - {bp.curve for bp in marked}
        if missing:
            raise GrunskyError(
                f"curve {sorted(missing)[0]} has no marked point")
        raise GrunskyError("marked points must supply exactly one point per curve")
    return marked


def gauge_anchor(domain, gmap):
    """Deterministic reference point where Re F is large (well-conditioned).

    The domain centroid can sit where Re F is exponentially small (far side
    of a thin annulus), which makes the F(z_ref) = 1 gauge useless; instead
    the anchor maximizes Re F over a fixed interior candidate set.
    """
    from .szego import interior_grid
    cands = list(interior_grid(domain, 24, seed=0, clearance=5.0))
    cands.append(domain.interior_anchor())
    vals = gmap.raw_interior(np.array(cands)).real
    return complex(cands[int(np.argmax(vals))])


def _normalize(gmap: GrunskyMap, c, C, anchor=None):
    if c is not None:
        gmap.scale = float(c)
        if gmap.scale <= 0:
            raise GrunskyError("scale must be positive")
        gmap.shift = float(C) if C is not None else 0.0
        return gmap
    if anchor is None:
        anchor = gauge_anchor(gmap.domain, gmap)
    ref = gmap.raw_interior(anchor)[0]
    if ref.real <= 0:
        raise GrunskyError(
            f"raw map has nonpositive real part {ref.real:.3e} at the anchor; "
            "construction is inconsistent")
    gmap.scale = 1.0 / ref.real
    gmap.shift = -gmap.scale * ref.imag
    gmap.gauge_point = complex(anchor)
    return gmap


def build_interior(domain, marked, a, c=None, C=None, ctx=None, anchor=None):
    """Grunsky map with interior base point a (kernel-formula construction).

    Requires a to be admissible: the n-1 zeros of S(.,a) must be distinct and
    simple, which solve_szego_boundary verifies.
    """
    marked = _checked_marked(domain, marked)
    if ctx is None:
        ctx = SolverContext(domain)
    kmat = ctx.kmat
    sol = solve_szego_boundary(domain, a, kmat=kmat)  # raises if degenerate
    weights = ctx.coefficients(marked)

    bfields = [solve_boundary_base(domain, bp, kmat=kmat) for bp in marked]
    l_at_marked = np.array([sol.l_at_boundary_point(bp) for bp in marked])
    scale_ref = float(np.max(np.abs(sol.l_boundary)))
    if np.any(np.abs(l_at_marked) < 1e-10 * scale_ref):
        raise GrunskyError(
            "a marked point coincides with a boundary zero of L(.,a); "
            "retry with a different base point")
    s_at_marked = np.array([sol.s_at_boundary_point(bp) for bp in marked])
    s_aa = sol.s_self()
    k0 = float(np.sum(weights * np.abs(s_at_marked) ** 2) / s_aa)

    gmap = GrunskyMap(domain=domain, kmat=kmat, marked=marked, weights=weights,
                      base_kind="interior", base=sol, bfields=bfields,
                      l_at_marked=l_at_marked, constant_term=k0)
    return _normalize(gmap, c, C, anchor=anchor)


def build_boundary(domain, marked, a0: BoundaryPoint, c=None, C=None, ctx=None,
                   anchor=None):
    """Grunsky map with boundary base point a0 (shorter kernel formula).

    F maps each marked point to infinity and a0 to zero (when the imaginary
    shift is zero).
    """
    marked = _checked_marked(domain, marked)
    loc0, _ = domain.point_and_tangent(a0)
    for bp in marked:
        loc, _ = domain.point_and_tangent(bp)
        if abs(loc - loc0) < 1e-12:
            raise GrunskyError("base point a0 coincides with a marked point")
    if ctx is None:
        ctx = SolverContext(domain)
    kmat = ctx.kmat
    weights = ctx.coefficients(marked)

    base = solve_boundary_base(domain, a0, kmat=kmat)
    bfields = [solve_boundary_base(domain, bp, kmat=kmat) for bp in marked]
    l_at_marked = np.array([base.l_at_boundary_point(bp) for bp in marked])
    scale_ref = float(np.median(np.abs(base.l_samples()[np.isfinite(base.l_samples())])))
    if np.any(np.abs(l_at_marked) < 1e-10 * scale_ref):
        raise GrunskyError(
            "a0 sits at a boundary zero of the marked-point kernel data; "
            "choose another a0")

    gmap = GrunskyMap(domain=domain, kmat=kmat, marked=marked, weights=weights,
                      base_kind="boundary", base=base, bfields=bfields,
                      l_at_marked=l_at_marked, constant_term=0.0)
    return _normalize(gmap, c, C, anchor=anchor)


# -- diagnostics -----------------------------------------------------------

def real_part_identity_check(gmap: GrunskyMap, points):
    """max |Re F - c * sum a_j |S(z,b_j)|^2 / S(z,z)| over interior points.

    The summands are not harmonic individually but their sum is Re F.
    """
    z_arr = np.atleast_1d(np.asarray(points, dtype=complex))
    fields = solve_at_points(gmap.kmat, z_arr)
    w = gmap.domain.flat_weights()
    s_zz = np.sum(np.abs(fields) ** 2 * w[:, None], axis=0)  # S(z,z) by reproducing
    n = gmap.domain.nodes_per_curve
    total = np.zeros(len(z_arr))
    for j, bp in enumerate(gmap.marked):
        block = fields[(bp.curve - 1) * n: bp.curve * n, :].T
        s_zb = np.conj(trig_interp(block, bp.t))
        total += gmap.weights[j] * np.abs(s_zb) ** 2
    rhs = gmap.scale * total / s_zz
    lhs = np.real(gmap.interior_from_fields(z_arr, fields))
    return float(np.max(np.abs(lhs - rhs)))


def _winding_count(cycles_vals, cycles_orient, w0):
    total = 0.0 + 0.0j
    for vals, orient in zip(cycles_vals, cycles_orient):
        shifted = vals - w0
        dvals = np.fft.ifft(np.fft.fft(shifted)
                            * 1j * np.fft.fftfreq(len(shifted), 1.0 / len(shifted)))
        h = TWO_PI / len(shifted)
        total += orient * np.sum(dvals / shifted) * h / (2.0j * np.pi)
    return total


def degree(gmap, w0=None, eps_factor=4.0, max_retries=3):
    """Argument-principle mapping degree over the offset boundary cycles.

    The target w0 must avoid values F takes on the contours; when not given
    it is scanned over a deterministic candidate set and the winding integral
    must come out integral, with contour-shrinking retries.
    """
    domain = gmap.domain
    factor = eps_factor
    last_err = None
    for _ in range(max_retries):
        cycles_vals, cycles_orient = [], []
        for j in range(1, domain.n_curves + 1):
            eps = min(factor * domain.node_spacing(j), 0.5 * domain.reach(j))
            cyc = domain.offset_cycle(j, eps)
            cycles_vals.append(gmap.interior(cyc.nodes))
            cycles_orient.append(cyc.orientation)
        allv = np.concatenate(cycles_vals)
        if w0 is None:
            # the winding counts the preimages inside the contours, each with
            # multiplicity +1, so it never overcounts; scan targets and keep
            # the best consistent count (a target too near the imaginary axis
            # or too large parks a preimage in the uncovered collar)
            level = float(np.median(np.abs(allv)))
            cands = [level * r * np.exp(1j * th)
                     for r in (0.6, 1.0, 1.7)
                     for th in (-0.9, -0.45, 0.0, 0.45, 0.9)]
            cands = [w for w in cands if w.real > 0]
        else:
            target = complex(w0)
            if target.real <= 0:
                raise GrunskyError("degree target must lie in the right half plane")
            cands = [target]
        best = None
        for target in cands:
            if np.min(np.abs(allv - target)) <= 1e-8 * max(1.0, abs(target)):
                last_err = GrunskyError(
                    "contour passes through a solution of F = w0")
                continue
            total = _winding_count(cycles_vals, cycles_orient, target)
            count = int(np.round(total.real))
            if abs(total - count) < 1e-3 and count >= 0:
                best = count if best is None else max(best, count)
            else:
                last_err = GrunskyError(
                    f"degree integral {total} not close to an integer")
        if best is not None:
            return best
        factor *= 0.5
        if w0 is not None:
            w0 = complex(w0) * (1.0 + 0.05j)
    raise last_err
