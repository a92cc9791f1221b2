import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from propermaps.geom import BoundaryPoint, CurveSpec, Domain
from propermaps.grunsky import SolverContext, build_interior

Q = 0.5


def make_disc(n=256):
    return Domain([CurveSpec.circle(0, 1.0)], n)


def make_annulus(n=256, q=Q):
    return Domain([CurveSpec.circle(0, q), CurveSpec.circle(0, 1.0)], n)


def make_three_connected(n=256):
    return Domain([CurveSpec.circle(-1.0, 0.35), CurveSpec.circle(1.0, 0.4),
                   CurveSpec.ellipse(0, 2.4, 1.8)], n)


ANNULUS_MARKED = [BoundaryPoint(1, 0.7), BoundaryPoint(2, 0.2)]
TRI_MARKED = [BoundaryPoint(1, 0.3), BoundaryPoint(2, 2.0), BoundaryPoint(3, 4.4)]
ANNULUS_BASE = 0.72
TRI_BASE = 0.1 + 0.9j


@pytest.fixture(scope="session")
def disc():
    return make_disc()


@pytest.fixture(scope="session")
def annulus():
    return make_annulus()


@pytest.fixture(scope="session")
def annulus512():
    return make_annulus(512)


@pytest.fixture(scope="session")
def tri():
    return make_three_connected()


@pytest.fixture(scope="session")
def tri512():
    return make_three_connected(512)


@pytest.fixture(scope="session")
def ecc_annulus():
    return Domain([CurveSpec.circle(0.25, 0.3), CurveSpec.circle(0, 1.0)], 256)


@pytest.fixture(scope="session")
def disc_ctx(disc):
    return SolverContext(disc)


@pytest.fixture(scope="session")
def annulus_ctx(annulus):
    return SolverContext(annulus)


@pytest.fixture(scope="session")
def annulus512_ctx(annulus512):
    return SolverContext(annulus512)


@pytest.fixture(scope="session")
def tri_ctx(tri):
    return SolverContext(tri)


@pytest.fixture(scope="session")
def tri512_ctx(tri512):
    return SolverContext(tri512)


@pytest.fixture(scope="session")
def annulus_map(annulus, annulus_ctx):
    return build_interior(annulus, ANNULUS_MARKED, ANNULUS_BASE, ctx=annulus_ctx)


@pytest.fixture(scope="session")
def annulus512_map(annulus512, annulus512_ctx):
    return build_interior(annulus512, ANNULUS_MARKED, ANNULUS_BASE, ctx=annulus512_ctx)


@pytest.fixture(scope="session")
def tri_map(tri, tri_ctx):
    return build_interior(tri, TRI_MARKED, TRI_BASE, ctx=tri_ctx)


@pytest.fixture(scope="session")
def tri512_map(tri512, tri512_ctx):
    return build_interior(tri512, TRI_MARKED, TRI_BASE, ctx=tri512_ctx)
