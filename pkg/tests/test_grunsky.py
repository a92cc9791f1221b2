import time

import numpy as np
import pytest

from propermaps.geom import BoundaryPoint, CurveSpec, Domain
from propermaps.grunsky import (GrunskyError, build_boundary, build_interior,
                                cayley, degree, evaluate,
                                real_part_identity_check)
from propermaps.szego import interior_grid, solve_at_points

from conftest import ANNULUS_MARKED, TRI_MARKED, Q
from oracles import mobius_rhp


def interior_test_grid(radius=0.88, n=20):
    g = np.linspace(-radius, radius, n)
    zz = (g[None, :] + 1j * g[:, None]).ravel()
    return zz[np.abs(zz) < radius]


def test_disc_reduces_to_mobius(disc, disc_ctx):
    gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, c=1.0, C=0.0,
                          ctx=disc_ctx)
    zz = interior_test_grid()
    vals = gmap.interior(zz) / gmap.interior(0.0)
    assert np.max(np.abs(vals - mobius_rhp(zz))) < 1e-8


def test_disc_boundary_base_mobius(disc, disc_ctx):
    gmap = build_boundary(disc, [BoundaryPoint(1, 0.0)], BoundaryPoint(1, np.pi),
                          c=1.0, C=0.0, ctx=disc_ctx)
    zz = interior_test_grid()
    vals = gmap.interior(zz) / gmap.interior(0.0)
    assert np.max(np.abs(vals - mobius_rhp(zz))) < 1e-8
    assert abs(gmap.boundary_point(BoundaryPoint(1, np.pi))) < 1e-6


def test_boundary_vanishing_annulus(annulus512_map):
    vals = annulus512_map.boundary_nodes()
    mask = annulus512_map.exclusion_mask() & np.isfinite(vals)
    med = np.median(np.abs(vals[mask]))
    assert np.max(np.abs(vals[mask].real)) / med < 1e-6


def test_pole_behavior(annulus_map, annulus512_map):
    def indicator(gmap, bp):
        d = gmap.domain
        n = d.nodes_per_curve
        vals = gmap.boundary_nodes()
        med = np.median(np.abs(vals[np.isfinite(vals)]))
        m = int(round(bp.t / (2 * np.pi / n)))
        idx = [(bp.curve - 1) * n + (m + s) % n for s in (-1, 1)]
        return max(abs(med / vals[i]) for i in idx)

    for bp in ANNULUS_MARKED:
        lo = indicator(annulus_map, bp)
        hi = indicator(annulus512_map, bp)
        assert lo < 0.05
        assert hi < lo  # tighter nodes sit closer to the pole


def test_base_agreement_up_to_gauge(annulus, annulus_ctx):
    pts = interior_grid(annulus, 20, seed=3)
    g1 = build_interior(annulus, ANNULUS_MARKED, 0.72, ctx=annulus_ctx)
    g2 = build_interior(annulus, ANNULUS_MARKED, -0.65 + 0.2j, ctx=annulus_ctx)
    g3 = build_boundary(annulus, ANNULUS_MARKED, BoundaryPoint(2, 3.0),
                        ctx=annulus_ctx)
    v1 = g1.interior(pts)
    assert np.max(np.abs(v1 - g2.interior(pts))) < 1e-6
    assert np.max(np.abs(v1 - g3.interior(pts))) < 1e-6


def test_gauge_freedom_is_exact(annulus, annulus_ctx):
    pts = interior_grid(annulus, 10, seed=5)
    ga = build_interior(annulus, ANNULUS_MARKED, 0.72, ctx=annulus_ctx,
                        c=2.5, C=-0.7)
    gb = build_interior(annulus, ANNULUS_MARKED, 0.72, ctx=annulus_ctx,
                        c=1.0, C=0.0)
    diff = (ga.interior(pts) - 1j * ga.shift) / ga.scale \
        - (gb.interior(pts) - 1j * gb.shift) / gb.scale
    assert np.max(np.abs(diff)) < 1e-12


def test_degree_all_connectivities(disc, disc_ctx, annulus_map, tri_map):
    gd = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, ctx=disc_ctx)
    assert degree(gd) == 1
    assert degree(annulus_map) == 2
    assert degree(tri_map) == 3


def test_real_part_identity(annulus, annulus_ctx, tri_map, tri):
    gmap = build_interior(annulus, ANNULUS_MARKED, 0.72, ctx=annulus_ctx,
                          c=1.0, C=0.0)
    pts = interior_grid(annulus, 20, seed=7, clearance=6.0)
    assert real_part_identity_check(gmap, pts) < 1e-6
    pts3 = interior_grid(tri, 20, seed=8, clearance=6.0)
    scaled = real_part_identity_check(tri_map, pts3) / tri_map.scale
    assert scaled < 1e-6


def test_real_part_identity_summands_nonnegative(annulus, annulus_ctx, annulus_map):
    pts = interior_grid(annulus, 12, seed=9)
    fields = solve_at_points(annulus_ctx.kmat, pts)
    w = annulus.flat_weights()
    s_zz = np.sum(np.abs(fields) ** 2 * w[:, None], axis=0)
    assert np.all(s_zz > 0)  # each summand a_j |S(z,b_j)|^2 / S(z,z) >= 0


def test_disc_identity_at_center(disc, disc_ctx):
    gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, ctx=disc_ctx,
                          c=1.0, C=0.0)
    # Re F(0) must equal the kernel combination |S(0,1)|^2/S(0,0) scaled
    assert real_part_identity_check(gmap, np.array([0.0 + 0.0j])) < 1e-8


def test_interior_positive_real_part(annulus_map, tri_map, annulus, tri):
    for gmap, dom, seed in ((annulus_map, annulus, 11), (tri_map, tri, 12)):
        pts = interior_grid(dom, 30, seed=seed)
        assert np.min(gmap.interior(pts).real) > 0


def test_cayley_values():
    assert abs(cayley(np.array(1.0 + 0.0j))) < 1e-15
    assert abs(cayley(np.array(1e13 + 0.0j)) - 1.0) < 1e-12
    inside = cayley(np.array([0.5 + 2.0j, 3.0 - 1.0j]))
    assert np.all(np.abs(inside) < 1.0)


def test_evaluate_samples(disc, disc_ctx, annulus_map):
    gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, ctx=disc_ctx,
                          anchor=0.0)  # normalize F(0) = 1: the tau_1 gauge
    s = evaluate(gmap, 0.0 + 0.0j)
    assert abs(s.rhp - 1.0) < 1e-10 and abs(s.disc) < 1e-10
    # boundary node far from the pole maps to the unit circle
    sb = evaluate(annulus_map, BoundaryPoint(2, 0.2 + np.pi))
    assert abs(abs(sb.disc) - 1.0) < 1e-6
    with pytest.raises(GrunskyError):
        evaluate(gmap, 2.0 + 0.0j)


def test_near_pole_flag(annulus_map, annulus):
    loc = annulus.point_and_tangent(ANNULUS_MARKED[0])[0]
    close = loc * (1.0 - 1.5 * annulus.node_spacing() / abs(loc))
    assert annulus_map.near_pole(np.array([close]))[0]
    assert not annulus_map.near_pole(np.array([annulus.interior_anchor()]))[0]


def test_im_f_monotone_on_boundary(annulus_map):
    d = annulus_map.domain
    n = d.nodes_per_curve
    vals = annulus_map.boundary_nodes().reshape(d.n_curves, n)
    mask = annulus_map.exclusion_mask().reshape(d.n_curves, n)
    for c in range(d.n_curves):
        im = vals[c].imag
        mk = mask[c]
        if d.orientation[c] < 0:
            im, mk = im[::-1], mk[::-1]
        steps = np.diff(im)
        keep = mk[:-1] & mk[1:]
        assert np.all(steps[keep] < 0)  # strictly decreasing along the image axis


def test_period_residuals_small(annulus_map, tri_map):
    from propermaps.verify import period_residuals
    for gmap in (annulus_map, tri_map):
        assert max(period_residuals(gmap)) < 1e-8


def test_disc_modulus_strictly_inside(disc, disc_ctx):
    gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, ctx=disc_ctx)
    pts = interior_test_grid(0.8, 12)
    assert np.max(np.abs(cayley(gmap.interior(pts)))) < 1.0


def test_missing_marked_point_message(annulus, annulus_ctx):
    with pytest.raises(GrunskyError, match="curve 2 has no marked point"):
        build_interior(annulus, [BoundaryPoint(1, 0.7)], 0.72, ctx=annulus_ctx)


def test_runtime_disc_budget(disc, disc_ctx):
    t0 = time.time()
    gmap = build_interior(disc, [BoundaryPoint(1, 0.0)], 0.0, c=1.0, C=0.0,
                          ctx=disc_ctx)
    zz = interior_test_grid()
    gmap.interior(zz)
    assert time.time() - t0 < 5.0
