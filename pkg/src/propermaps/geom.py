"""Multiply connected domains bounded by parametrized analytic Jordan curves.

A domain is described by n closed curves, the outermost listed last.  Every
curve is stored with counterclockwise parametrization; the standard
orientation (domain on the left) is applied only when tangents are requested,
so there is a single sign site for the orientation convention.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .fourier import spectral_derivative, trig_interp


class GeometryError(ValueError):
    pass


class NearBoundaryError(GeometryError):
    """Query point too close to the boundary for a reliable answer."""


@dataclass(frozen=True)
class CurveSpec:
    """One analytic Jordan curve z(t) = sum_k c_k e^{ikt}.

    kind is "circle", "ellipse" or "trig"; the Fourier coefficients are
    derived from the shape parameters at construction.
    """

    kind: str
    coeffs: dict = field(default_factory=dict)  # mode -> complex coefficient

    @staticmethod
    def circle(center, radius):
        if radius <= 0:
            raise GeometryError("circle radius must be positive")
        return CurveSpec("circle", {0: complex(center), 1: complex(radius)})

    @staticmethod
    def ellipse(center, semi_x, semi_y):
        if semi_x <= 0 or semi_y <= 0:
            raise GeometryError("ellipse semi-axes must be positive")
        return CurveSpec("ellipse", {
            0: complex(center),
            1: complex((semi_x + semi_y) / 2.0),
            -1: complex((semi_x - semi_y) / 2.0),
        })

    @staticmethod
    def trig(coeffs):
        cleaned = {int(k): complex(c) for k, c in coeffs.items() if c != 0}
        if not cleaned:
            raise GeometryError("trig curve needs at least one coefficient")
        return CurveSpec("trig", cleaned)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        z = np.zeros(t.shape, dtype=complex)
        for k, c in self.coeffs.items():
            z = z + c * np.exp(1j * k * t)
        return z

    def derivative(self, t, order=1):
        t = np.asarray(t, dtype=float)
        z = np.zeros(t.shape, dtype=complex)
        for k, c in self.coeffs.items():
            z = z + c * (1j * k) ** order * np.exp(1j * k * t)
        return z


def _segments_intersect(p, q, r, s):
    """Vectorized proper-intersection test for segment arrays."""
    def cross(a, b):
        return a.real * b.imag - a.imag * b.real

    d1 = cross(q - p, r - p)
    d2 = cross(q - p, s - p)
    d3 = cross(s - r, p - r)
    d4 = cross(s - r, q - r)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


class Domain:
    """Validated n-connected domain with cached quadrature data.

    curves: inner curves first, outer curve last (gamma_n outermost).
    nodes_per_curve: trapezoid node count N (power of two, shared by all
    curves).  Immutable after construction; evaluators only read from it.
    """

    def __init__(self, curves, nodes_per_curve=256):
        n = int(nodes_per_curve)
        if n < 8 or (n & (n - 1)) != 0:
            raise GeometryError("node count must be a power of two, >= 8")
        self.curves = list(curves)
        self.n_curves = len(self.curves)
        if self.n_curves < 1:
            raise GeometryError("domain needs at least one curve")
        self.nodes_per_curve = n

        self.t_nodes = 2.0 * np.pi * np.arange(n) / n
        self.z = np.stack([c.point(self.t_nodes) for c in self.curves])
        self.dz = np.stack([c.derivative(self.t_nodes) for c in self.curves])
        self.ddz = np.stack([c.derivative(self.t_nodes, 2) for c in self.curves])
        self.speed = np.abs(self.dz)

        # standard orientation: parametrization direction on the outer
        # curve, reversed on the inner curves
        self.orientation = np.full(self.n_curves, -1.0)
        self.orientation[-1] = 1.0

        self._validate()

        self.unit_tangent = (self.orientation[:, None] * self.dz) / self.speed
        self.weights = (2.0 * np.pi / n) * self.speed
        self.diameter = float(np.max(np.abs(
            self.z.reshape(-1)[:, None] - self.z.reshape(-1)[None, :])))

    # -- validation ------------------------------------------------------

    def _validate(self):
        fine = 2.0 * np.pi * np.arange(4 * self.nodes_per_curve) / (4 * self.nodes_per_curve)
        for idx, curve in enumerate(self.curves):
            dz = curve.derivative(fine)
            if np.min(np.abs(dz)) < 1e-12:
                raise GeometryError(f"curve {idx + 1}: z'(t) vanishes")
            z = curve.point(fine)
            area = 0.5 * np.mean(np.imag(np.conj(z) * dz)) * 2.0 * np.pi
            if area <= 0:
                raise GeometryError(
                    f"curve {idx + 1}: parametrization must be counterclockwise")
            self._check_simple(idx, curve)
        self._check_nesting()

    def _check_simple(self, idx, curve, samples=512):
        # sampled Jordan check on a capped grid: pairwise segment crossings
        ts = 2.0 * np.pi * np.arange(samples) / samples
        z = curve.point(ts)
        p = z
        q = np.roll(z, -1)
        m = len(z)
        i, j = np.triu_indices(m, k=2)
        keep = ~((i == 0) & (j == m - 1))
        i, j = i[keep], j[keep]
        hit = _segments_intersect(p[i], q[i], p[j], q[j])
        if np.any(hit):
            raise GeometryError(f"curve {idx + 1}: self-intersection detected")

    def _check_nesting(self):
        outer = self.n_curves - 1
        for i in range(self.n_curves):
            for j in range(self.n_curves):
                if i == j:
                    continue
                wind = winding_number(self.z[i], self.dz[i], self.z[j])
                inside = np.all(wind == 1)
                outside = np.all(wind == 0)
                if i == outer:
                    if not inside:
                        raise GeometryError(
                            f"curve {j + 1} is not inside the outer curve")
                elif not outside:
                    raise GeometryError(
                        f"curves {i + 1} and {j + 1} are not mutually exterior")
        # distinct curves must not touch
        flat = self.z.reshape(self.n_curves, -1)
        for i in range(self.n_curves):
            for j in range(i + 1, self.n_curves):
                d = np.min(np.abs(flat[i][:, None] - flat[j][None, :]))
                if d < 1e-9:
                    raise GeometryError(f"curves {i + 1} and {j + 1} touch")

    # -- queries ---------------------------------------------------------

    def is_outer(self, j):
        self._check_index(j)
        return j == self.n_curves

    def _check_index(self, j):
        if not 1 <= j <= self.n_curves:
            raise GeometryError(f"curve index {j} out of range 1..{self.n_curves}")

    def point_and_tangent(self, bp):
        """Location and standard-orientation unit tangent of a boundary point."""
        self._check_index(bp.curve)
        curve = self.curves[bp.curve - 1]
        z = curve.point(bp.t)
        dz = curve.derivative(bp.t)
        tangent = self.orientation[bp.curve - 1] * dz / np.abs(dz)
        return complex(z), complex(tangent)

    def quadrature(self, j):
        """Trapezoid nodes t_m and arc-length weights on curve j."""
        self._check_index(j)
        return self.t_nodes.copy(), self.weights[j - 1].copy()

    def _winding_about(self, k, z, max_samples=1 << 16):
        """Winding of curve k about z, upsampling when z is near the curve."""
        d = np.min(np.abs(self.z[k] - z))
        spacing = 2.0 * np.pi * np.max(self.speed[k]) / self.nodes_per_curve
        if d > 3.0 * spacing:
            return winding_number(self.z[k], self.dz[k], z)
        m = self.nodes_per_curve
        while 2.0 * np.pi * np.max(self.speed[k]) / m > 0.25 * d:
            m *= 2
            if m > max_samples:
                raise NearBoundaryError(
                    f"point {z} is too close to curve {k + 1} for a reliable "
                    "membership test")
        ts = 2.0 * np.pi * np.arange(m) / m
        curve = self.curves[k]
        return winding_number(curve.point(ts), curve.derivative(ts), z)

    def contains(self, z, tol=None):
        """Winding-number membership test; raises near the boundary."""
        z = complex(z)
        if tol is None:
            tol = 1e-10 * self.diameter
        if np.min(np.abs(self.z.reshape(-1) - z)) < tol:
            raise NearBoundaryError(f"point {z} is within {tol} of the boundary")
        outer = self.n_curves - 1
        if self._winding_about(outer, z) != 1:
            return False
        for k in range(self.n_curves - 1):
            if self._winding_about(k, z) != 0:
                return False
        return True

    def boundary_distance(self, z):
        """Distance from z to the sampled boundary nodes."""
        return float(np.min(np.abs(self.z.reshape(-1) - complex(z))))

    def node_spacing(self, j=None):
        if j is None:
            return float(np.max(self.weights))
        self._check_index(j)
        return float(np.max(self.weights[j - 1]))

    def reach(self, j):
        """Safe inward offset for curve j: curvature radius and clearance."""
        self._check_index(j)
        k = j - 1
        curv = np.imag(np.conj(self.dz[k]) * self.ddz[k]) / self.speed[k] ** 3
        with np.errstate(divide="ignore"):
            radius = np.where(np.abs(curv) > 1e-14, 1.0 / np.abs(curv), np.inf)
        bound = float(np.min(radius))
        others = [self.z[i] for i in range(self.n_curves) if i != k]
        if others:
            other = np.concatenate(others)
            gap = np.min(np.abs(self.z[k][:, None] - other[None, :]))
            bound = min(bound, 0.5 * float(gap))
        return bound

    def offset_cycle(self, j, eps):
        """Cycle homotopic to curve j, offset eps along the inward normal."""
        self._check_index(j)
        if eps <= 0:
            raise GeometryError("offset must be positive")
        if eps >= self.reach(j):
            raise GeometryError(
                f"offset {eps} exceeds reach estimate {self.reach(j):.4g} of curve {j}")
        k = j - 1
        inward = 1j * self.unit_tangent[k]
        nodes = self.z[k] + eps * inward
        deriv = spectral_derivative(nodes)
        for w in nodes[:: max(1, len(nodes) // 32)]:
            if not self.contains(w):
                raise GeometryError(f"offset cycle of curve {j} leaves the domain")
        return Cycle(curve=j, eps=float(eps), nodes=nodes, deriv=deriv,
                     orientation=float(self.orientation[k]))

    def interior_anchor(self):
        """A deterministic interior point with maximal boundary clearance."""
        candidates = [complex(np.mean(self.z[self.n_curves - 1]))]
        for j in range(1, self.n_curves + 1):
            eps = 0.45 * self.reach(j)
            k = j - 1
            candidates.extend(self.z[k][::8] + eps * 1j * self.unit_tangent[k][::8])
        flat = self.flat_nodes()
        xs = np.linspace(flat.real.min(), flat.real.max(), 17)[1:-1]
        ys = np.linspace(flat.imag.min(), flat.imag.max(), 17)[1:-1]
        candidates.extend(complex(x, y) for x in xs for y in ys)

        best, best_d = None, 0.0
        for z in candidates:
            z = complex(z)
            d = self.boundary_distance(z)
            if d <= best_d:
                continue
            try:
                if self.contains(z):
                    best, best_d = z, d
            except NearBoundaryError:
                continue
        if best is None:
            raise GeometryError("no interior anchor found")
        return best

    # -- flattened views used by the integral-equation modules -----------

    def flat_nodes(self):
        return self.z.reshape(-1)

    def flat_tangent(self):
        return self.unit_tangent.reshape(-1)

    def flat_weights(self):
        return self.weights.reshape(-1)

    def flat_complex_weights(self):
        """Signed complex measure dy along the standard orientation."""
        h = 2.0 * np.pi / self.nodes_per_curve
        return (self.orientation[:, None] * self.dz * h).reshape(-1)

    def flat_curve_index(self):
        return np.repeat(np.arange(1, self.n_curves + 1), self.nodes_per_curve)

    def content_hash(self):
        payload = {
            "nodes": self.nodes_per_curve,
            "curves": [
                {"kind": c.kind,
                 "coeffs": {str(k): [v.real, v.imag] for k, v in sorted(c.coeffs.items())}}
                for c in self.curves
            ],
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class BoundaryPoint:
    """A point on curve `curve` (1-based) at parameter t in [0, 2pi)."""

    curve: int
    t: float

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t) % (2.0 * np.pi))


@dataclass(frozen=True)
class Cycle:
    """Offset cycle nodes with derivative samples, homotopic to a curve."""

    curve: int
    eps: float
    nodes: np.ndarray
    deriv: np.ndarray
    orientation: float


def winding_number(z_nodes, dz_nodes, z0):
    """Winding of a sampled counterclockwise curve about z0 (trapezoid)."""
    h = 2.0 * np.pi / len(z_nodes)
    z0_arr = np.atleast_1d(np.asarray(z0, dtype=complex))
    val = (dz_nodes[None, :] / (z_nodes[None, :] - z0_arr[:, None])).sum(axis=1) \
        * h / (2.0j * np.pi)
    out = np.round(val.real).astype(int)
    return out if np.ndim(z0) else int(out[0])


def boundary_values_at(domain, samples, bp):
    """Trigonometric interpolation of per-node boundary samples at bp."""
    n = domain.nodes_per_curve
    block = np.asarray(samples).reshape(domain.n_curves, n)[bp.curve - 1]
    return complex(trig_interp(block, bp.t))


# -- domain spec files ----------------------------------------------------

def curve_from_dict(d):
    kind = d.get("kind")
    if kind == "circle":
        cx, cy = d["center"]
        return CurveSpec.circle(complex(cx, cy), float(d["radius"]))
    if kind == "ellipse":
        cx, cy = d["center"]
        return CurveSpec.ellipse(complex(cx, cy), float(d["semi_x"]), float(d["semi_y"]))
    if kind == "trig":
        coeffs = {int(k): complex(v[0], v[1]) for k, v in d["coeffs"].items()}
        return CurveSpec.trig(coeffs)
    raise GeometryError(f"unknown curve kind {kind!r}")


def curve_to_dict(c):
    if c.kind == "circle":
        center = c.coeffs[0]
        return {"kind": "circle", "center": [center.real, center.imag],
                "radius": c.coeffs[1].real}
    if c.kind == "ellipse":
        center = c.coeffs.get(0, 0j)
        s = c.coeffs.get(1, 0j).real
        d = c.coeffs.get(-1, 0j).real
        return {"kind": "ellipse", "center": [center.real, center.imag],
                "semi_x": s + d, "semi_y": s - d}
    return {"kind": "trig",
            "coeffs": {str(k): [v.real, v.imag] for k, v in sorted(c.coeffs.items())}}


def load_domain(path, nodes=None):
    """Read a domain spec file (JSON, outer curve last)."""
    with open(path) as fh:
        data = json.load(fh)
    curves = [curve_from_dict(d) for d in data["curves"]]
    n = nodes if nodes is not None else data.get("nodes", 256)
    return Domain(curves, nodes_per_curve=n)


def save_domain(domain, path):
    data = {"curves": [curve_to_dict(c) for c in domain.curves],
            "nodes": domain.nodes_per_curve}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
