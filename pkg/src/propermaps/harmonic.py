"""Harmonic measures and the boundary derivative fields F_j' = 2 dw_j/dz.

Each harmonic measure is represented by a double-layer density plus one
logarithmic source per hole, which makes the second-kind system uniquely
solvable on multiply connected domains.  The derivative fields come from
differentiating that representation in closed form (an integration by parts
turns the dipole integral into a Cauchy integral of d(mu)), never from finite
differences, so they inherit the spectral accuracy of the solve.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .fourier import spectral_derivative
from .geom import Domain

TWO_PI = 2.0 * np.pi


class HarmonicError(ValueError):
    pass


class HarmonicSystem:
    """Shared double-layer system for all n harmonic measures of a domain."""

    def __init__(self, domain: Domain):
        self.domain = domain
        x = domain.flat_nodes()
        tang = domain.flat_tangent()
        w = domain.flat_weights()
        m = len(x)
        n_holes = domain.n_curves - 1

        normal = -1j * tang  # outward with respect to the domain
        diff = x[None, :] - x[:, None]
        np.fill_diagonal(diff, 1.0)
        kernel = np.real(normal[None, :] / diff) / TWO_PI
        # diagonal limit: curvature of the counterclockwise parametrization,
        # signed by the standard orientation of the curve
        dz = domain.dz.reshape(-1)
        ddz = domain.ddz.reshape(-1)
        curv = np.imag(np.conj(dz) * ddz) / np.abs(dz) ** 3
        orient = np.repeat(domain.orientation, domain.nodes_per_curve)
        np.fill_diagonal(kernel, orient * curv / (2.0 * TWO_PI))
        self.kernel = kernel

        self.anchors = np.array([
            np.mean(domain.z[k]) for k in range(n_holes)], dtype=complex)

        size = m + n_holes
        sys = np.zeros((size, size))
        sys[:m, :m] = 0.5 * np.eye(m) + kernel * w[None, :]
        for k, wk in enumerate(self.anchors):
            sys[:m, m + k] = np.log(np.abs(x - wk))
        for k in range(n_holes):
            sel = slice(k * domain.nodes_per_curve, (k + 1) * domain.nodes_per_curve)
            sys[m + k, :m][sel] = w[sel]
        self.matrix = sys
        self._lu = lu_factor(sys)
        self._m = m
        self._n_holes = n_holes

    def solve(self, trace):
        rhs = np.concatenate([trace, np.zeros(self._n_holes)])
        sol = lu_solve(self._lu, rhs)
        sol += lu_solve(self._lu, rhs - self.matrix @ sol)  # one refinement step
        return sol[:self._m], sol[self._m:]


@dataclass
class HarmonicMeasure:
    """Density and log-source representation of one harmonic measure."""

    domain: Domain
    curve: int
    mu: np.ndarray
    sources: np.ndarray
    anchors: np.ndarray
    trace_residual: float

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        """Interior values of the harmonic measure."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        d = self.domain
        x = d.flat_nodes()
        w = d.flat_weights()
        normal = -1j * d.flat_tangent()
        vals = (np.real(normal[None, :] / (x[None, :] - z_arr[:, None]))
                @ (self.mu * w)) / TWO_PI
        for s, wk in zip(self.sources, self.anchors):
            vals = vals + s * np.log(np.abs(z_arr - wk))
        return vals if np.ndim(z) else float(vals[0])


def harmonic_measure(domain, j, system=None):
    """Solve for the harmonic measure of curve j (1 on gamma_j, 0 elsewhere)."""
    if not 1 <= j <= domain.n_curves:
        raise HarmonicError(f"curve index {j} out of range")
    if system is None:
        system = HarmonicSystem(domain)
    n = domain.nodes_per_curve
    trace = np.zeros(domain.n_curves * n)
    trace[(j - 1) * n: j * n] = 1.0
    mu, sources = system.solve(trace)
    resid = system.matrix[:len(trace), :len(trace)] @ mu
    for k, wk in enumerate(system.anchors):
        resid = resid + sources[k] * np.log(np.abs(domain.flat_nodes() - wk))
    trace_residual = float(np.max(np.abs(resid - trace)))
    return HarmonicMeasure(domain=domain, curve=j, mu=mu, sources=sources,
                           anchors=system.anchors, trace_residual=trace_residual)


def all_harmonic_measures(domain, system=None):
    if system is None:
        system = HarmonicSystem(domain)
    return [harmonic_measure(domain, j, system) for j in range(1, domain.n_curves + 1)]


@dataclass
class FPrimeField:
    """Boundary samples of F_j' = 2 dw_j/dz with its interior evaluator."""

    domain: Domain
    curve: int
    samples: np.ndarray
    measure: HarmonicMeasure

    def interior(self, z):
        return f_prime_interior(self.measure, z)


def _mu_dot(domain, mu):
    blocks = mu.reshape(domain.n_curves, domain.nodes_per_curve)
    return np.real(spectral_derivative(blocks)).reshape(-1)


def f_prime_interior(measure: HarmonicMeasure, z):
    """F'(z) = (-i/2pi) oint d(mu)/(y-z) + sum_k s_k/(z - w_k), z interior."""
    d = measure.domain
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    mud = _mu_dot(d, measure.mu)
    orient = np.repeat(d.orientation, d.nodes_per_curve)
    h = TWO_PI / d.nodes_per_curve
    y = d.flat_nodes()
    vals = (1.0 / (y[None, :] - z_arr[:, None])) @ (orient * mud * h)
    vals = vals * (-1j / TWO_PI)
    for s, wk in zip(measure.sources, measure.anchors):
        vals = vals + s / (z_arr - wk)
    return vals if np.ndim(z) else complex(vals[0])


def f_prime_boundary(measure: HarmonicMeasure):
    """Boundary samples of F_j' as interior limits of the representation.

    Per node the own-curve Cauchy integral is split into a subtracted smooth
    part plus the Plemelj jump, which keeps the trapezoid rule spectral.
    """
    d = measure.domain
    n = d.nodes_per_curve
    h = TWO_PI / n
    mud = _mu_dot(d, measure.mu)
    vals = np.zeros(d.n_curves * n, dtype=complex)

    mu_blocks = measure.mu.reshape(d.n_curves, n)
    psi_all = np.real(spectral_derivative(mu_blocks)) / d.dz       # mu_t / z'
    psi_dot = spectral_derivative(psi_all)

    for c in range(d.n_curves):
        own = slice(c * n, (c + 1) * n)
        x_own = d.z[c]
        psi = psi_all[c]
        # smooth contributions of the other curves
        for c2 in range(d.n_curves):
            if c2 == c:
                continue
            contrib = (1.0 / (d.z[c2][None, :] - x_own[:, None])) @ (mud[c2 * n:(c2 + 1) * n] * h)
            vals[own] += d.orientation[c2] * contrib
        # own curve: subtracted Cauchy integral in dy plus the jump
        diff = x_own[None, :] - x_own[:, None]
        np.fill_diagonal(diff, 1.0)
        integrand = (psi[None, :] - psi[:, None]) / diff * d.dz[c][None, :]
        np.fill_diagonal(integrand, psi_dot[c])
        sub = integrand.sum(axis=1) * h
        if d.orientation[c] > 0:
            vals[own] += sub + 2.0j * np.pi * psi
        else:
            vals[own] += -sub
    vals = vals * (-1j / TWO_PI)

    x = d.flat_nodes()
    for s, wk in zip(measure.sources, measure.anchors):
        vals = vals + s / (x - wk)
    field = FPrimeField(domain=d, curve=measure.curve, samples=vals,
                        measure=measure)
    _check_field(field)
    return field


def _check_field(field: FPrimeField):
    d = field.domain
    tang = d.flat_tangent()
    prod = field.samples * tang
    re_residual = float(np.max(np.abs(np.real(prod))))
    scale = float(np.max(np.abs(prod)))
    if scale < 1e-10:  # identically zero field (simply connected)
        return
    if re_residual / scale > 1e-6:
        raise HarmonicError(
            f"F' T is not purely imaginary on the boundary "
            f"(residual {re_residual:.2e}); harmonic solve is inconsistent")


def all_f_prime_fields(domain, system=None):
    measures = all_harmonic_measures(domain, system)
    return [f_prime_boundary(m) for m in measures]


def reflection_quotient_check(f1: FPrimeField, fj: FPrimeField):
    """max |Im(F_j'/F_1')| over the boundary nodes; the quotient is real."""
    if f1.domain is not fj.domain:
        raise HarmonicError("fields must live on the same domain")
    quot = fj.samples / f1.samples
    return float(np.max(np.abs(np.imag(quot))))
