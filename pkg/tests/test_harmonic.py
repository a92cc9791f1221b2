import numpy as np
import pytest

from propermaps.geom import CurveSpec, Domain
from propermaps.harmonic import (HarmonicError, HarmonicSystem, all_f_prime_fields,
                                 all_harmonic_measures, f_prime_interior,
                                 harmonic_measure, reflection_quotient_check)
from propermaps.szego import interior_grid

from conftest import Q
from oracles import f1_prime_annulus, harmonic_measure_annulus_outer


def test_disc_measure_is_one(disc):
    m = harmonic_measure(disc, 1)
    pts = interior_grid(disc, 10, seed=0)
    assert np.max(np.abs(m.evaluate(pts) - 1.0)) < 1e-12
    assert m.trace_residual < 1e-10


def test_annulus_outer_measure_closed_form(annulus):
    m = harmonic_measure(annulus, 2)
    pts = interior_grid(annulus, 15, seed=1)
    exact = harmonic_measure_annulus_outer(pts, Q)
    assert np.max(np.abs(m.evaluate(pts) - exact)) < 1e-10
    assert abs(m.evaluate(np.sqrt(Q) + 0j) - 0.5) < 1e-10


def test_measures_sum_to_one(tri, tri_ctx):
    system = HarmonicSystem(tri)
    measures = all_harmonic_measures(tri, system)
    pts = interior_grid(tri, 20, seed=2)
    total = sum(m.evaluate(pts) for m in measures)
    assert np.max(np.abs(total - 1.0)) < 1e-8


def test_maximum_principle(tri):
    m = harmonic_measure(tri, 1)
    pts = interior_grid(tri, 40, seed=3)
    vals = m.evaluate(pts)
    assert np.all(vals > 0.0) and np.all(vals < 1.0)


def test_annulus_f_prime_closed_form(annulus):
    fields = all_f_prime_fields(annulus)
    nodes = annulus.flat_nodes()[:: len(annulus.flat_nodes()) // 8]
    samples = fields[0].samples[:: len(annulus.flat_nodes()) // 8]
    assert np.max(np.abs(samples - f1_prime_annulus(nodes, Q))) < 1e-8
    # interior evaluator too
    pts = interior_grid(annulus, 8, seed=4)
    vals = f_prime_interior(fields[0].measure, pts)
    assert np.max(np.abs(vals - f1_prime_annulus(pts, Q))) < 1e-10


def test_f_prime_sum_vanishes(tri, tri_ctx):
    fields = tri_ctx.f_prime_fields
    total = sum(f.samples for f in fields)
    scale = max(np.max(np.abs(f.samples)) for f in fields)
    assert np.max(np.abs(total)) < 1e-8 * scale


def test_f_prime_tangent_product_imaginary(tri, tri_ctx):
    tang = tri.flat_tangent()
    for f in tri_ctx.f_prime_fields:
        prod = f.samples * tang
        assert np.max(np.abs(prod.real)) < 1e-8 * np.max(np.abs(prod))


def test_quotient_trivial_and_annulus(annulus, annulus_ctx):
    fields = annulus_ctx.f_prime_fields
    assert reflection_quotient_check(fields[0], fields[0]) < 1e-14
    quot = fields[1].samples / fields[0].samples
    assert np.max(np.abs(quot + 1.0)) < 1e-8      # F2'/F1' = -1 exactly


def test_quotient_three_connected(tri, tri_ctx):
    fields = tri_ctx.f_prime_fields
    assert max(reflection_quotient_check(fields[0], f) for f in fields) < 1e-7


def test_f_prime_self_convergence(ecc_annulus):
    hi = Domain(ecc_annulus.curves, 512)
    lo_fields = all_f_prime_fields(ecc_annulus)
    hi_fields = all_f_prime_fields(hi)
    lo = lo_fields[0].samples.reshape(2, -1)
    hi_common = hi_fields[0].samples.reshape(2, -1)[:, ::2]
    assert np.max(np.abs(lo - hi_common)) < 1e-9


def test_bad_curve_index(annulus):
    with pytest.raises(HarmonicError):
        harmonic_measure(annulus, 3)
