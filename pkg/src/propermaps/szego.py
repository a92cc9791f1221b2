"""Szego and Garabedian kernels via the Kerzman-Stein integral equation.

Boundary values of S(.,a) solve the second-kind system (I + A)u = C_a on the
trapezoid nodes, where A is the smooth skew-hermitian Kerzman-Stein kernel
and C_a is the Cauchy kernel of the base point.  The system matrix depends
only on the domain, so one LU factorization serves every base point; interior
values follow by Cauchy transforms of the boundary data.

Fields based at a *boundary* point b (needed for map construction) are never
obtained by placing b in the right-hand side, which is singular.  Instead the
smooth remainder rho = S(.,b) - C_b solves the same system with the interior
limit of A C_w as data, and the known Cauchy-kernel pole is added back.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve, svdvals
from scipy.linalg.lapack import zgecon

from .fourier import spectral_derivative, trig_interp
from .geom import BoundaryPoint, Domain, GeometryError

TWO_PI = 2.0 * np.pi


class SzegoError(ValueError):
    pass


class DegenerateBasePointError(SzegoError):
    """Zeros of S(.,a) not distinct/simple or miscounted: choose different a."""


class KernelMatrix:
    """Discretized (I + A) with its factorization and diagnostics."""

    def __init__(self, domain: Domain):
        self.domain = domain
        x = domain.flat_nodes()
        tang = domain.flat_tangent()
        w = domain.flat_weights()
        m = len(x)

        diff = x[None, :] - x[:, None]
        np.fill_diagonal(diff, 1.0)  # diagonal of A is zero by the smooth limit
        kernel = (np.conj(tang)[:, None] / np.conj(diff)
                  - tang[None, :] / diff) / (2.0j * np.pi)
        np.fill_diagonal(kernel, 0.0)
        self.kernel = kernel

        sw = np.sqrt(w)
        sym = kernel * sw[:, None] * sw[None, :]
        self.skew_defect = float(np.max(np.abs(sym + sym.conj().T)))

        self.matrix = np.eye(m, dtype=complex) + kernel * w[None, :]
        self._lu = lu_factor(self.matrix)
        anorm = np.linalg.norm(self.matrix, 1)
        rcond, _ = zgecon(self._lu[0], anorm, norm="1")
        self.condition = float(1.0 / max(rcond, 1e-300))
        if rcond < 1e-13:
            raise SzegoError(
                f"Kerzman-Stein system ill-conditioned (cond ~ {self.condition:.3e})")

        self._x = x
        self._tang = tang
        self._w = w

    def solve(self, rhs):
        return lu_solve(self._lu, rhs)

    def cauchy_rhs(self, points):
        """C_a columns for an array of interior base points."""
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        cols = np.conj(self._tang[:, None] / (self._x[:, None] - pts[None, :])
                       / (2.0j * np.pi))
        return cols


@dataclass
class SzegoSolution:
    """Boundary data of S(.,a) and L(.,a) for an interior base point a."""

    domain: Domain
    kmat: KernelMatrix
    a: complex
    s_boundary: np.ndarray
    l_boundary: np.ndarray
    residual: float
    zeros: list = field(default_factory=list)

    def s_at_node_field(self):
        return self.s_boundary

    def s_at_boundary_point(self, bp: BoundaryPoint):
        return _interp_field(self.domain, self.s_boundary, bp)

    def l_at_boundary_point(self, bp: BoundaryPoint):
        return _interp_field(self.domain, self.l_boundary, bp)

    def s_self(self):
        """S(a,a) from the reproducing property (arc-length norm)."""
        w = self.domain.flat_weights()
        return float(np.sum(np.abs(self.s_boundary) ** 2 * w))


def _interp_field(domain, samples, bp: BoundaryPoint):
    n = domain.nodes_per_curve
    block = np.asarray(samples).reshape(domain.n_curves, n)[bp.curve - 1]
    return complex(trig_interp(block, bp.t))


def garabedian_from_szego(domain, s_samples):
    """L samples from conj(S(z,a)) = (1/i) L(z,a) T(z), exact at the nodes."""
    tang = domain.flat_tangent()
    return 1j * np.conj(s_samples) * np.conj(tang)


def solve_szego_boundary(domain, a, kmat=None, find_zeros=True):
    """Boundary samples of the Szego kernel based at interior a."""
    a = complex(a)
    if not domain.contains(a):
        raise SzegoError(f"base point {a} is not inside the domain")
    if kmat is None:
        kmat = KernelMatrix(domain)

    dist = domain.boundary_distance(a)
    spacing = domain.node_spacing()
    if dist < 5.0 * spacing:
        warnings.warn(
            f"base point {a} is within 5 node spacings of the boundary; "
            "accuracy is degraded", stacklevel=2)

    rhs = kmat.cauchy_rhs(a)[:, 0]
    u = kmat.solve(rhs)
    residual = float(np.max(np.abs(kmat.matrix @ u - rhs)) / np.max(np.abs(rhs)))
    sol = SzegoSolution(
        domain=domain, kmat=kmat, a=a,
        s_boundary=u,
        l_boundary=garabedian_from_szego(domain, u),
        residual=residual)
    if find_zeros:
        sol.zeros = find_szego_zeros(sol)
    return sol


def solve_at_points(kmat, points):
    """Boundary fields S(., z_g) for a batch of interior points (one LU)."""
    rhs = kmat.cauchy_rhs(points)
    return kmat.solve(rhs)


# -- interior evaluation by Cauchy transforms ------------------------------

def cauchy_transform(domain, samples, z):
    """(1/2pi i) * integral of samples/(y - z) dy over the oriented boundary."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    cw = domain.flat_complex_weights()
    y = domain.flat_nodes()
    vals = ((samples * cw)[None, :] / (y[None, :] - z[:, None])).sum(axis=1)
    return vals / (2.0j * np.pi)


def cauchy_transform_derivative(domain, samples, z, order=1):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    cw = domain.flat_complex_weights()
    y = domain.flat_nodes()
    fact = {1: 1.0, 2: 2.0}[order]
    vals = ((samples * cw)[None, :]
            / (y[None, :] - z[:, None]) ** (order + 1)).sum(axis=1)
    return fact * vals / (2.0j * np.pi)


def szego_interior(sol: SzegoSolution, z):
    """S(z,a) for interior z, by Cauchy transform of the boundary samples."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    _warn_close(sol.domain, z_arr, 3.0)
    vals = cauchy_transform(sol.domain, sol.s_boundary, z_arr)
    return vals if np.ndim(z) else complex(vals[0])


def garabedian_regular_part(sol: SzegoSolution):
    """Boundary samples of L(.,a) - 1/(2pi (.-a)), a holomorphic remainder."""
    y = sol.domain.flat_nodes()
    return sol.l_boundary - 1.0 / (TWO_PI * (y - sol.a))


def garabedian_interior(sol: SzegoSolution, z):
    """L(z,a) = 1/(2pi(z-a)) + Cauchy transform of the regular part."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z_arr - sol.a) < 1e-13):
        raise SzegoError("Garabedian kernel has a pole at the base point")
    reg = cauchy_transform(sol.domain, garabedian_regular_part(sol), z_arr)
    vals = 1.0 / (TWO_PI * (z_arr - sol.a)) + reg
    return vals if np.ndim(z) else complex(vals[0])


def garabedian_inverse_interior(sol: SzegoSolution, z):
    """1/L(z,a), regular through the pole at a: 2pi(z-a)/(1 + 2pi(z-a)R(z))."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    reg = cauchy_transform(sol.domain, garabedian_regular_part(sol), z_arr)
    shift = TWO_PI * (z_arr - sol.a)
    vals = shift / (1.0 + shift * reg)
    return vals if np.ndim(z) else complex(vals[0])


def _warn_close(domain, z_arr, spacings):
    spacing = domain.node_spacing()
    d = np.min(np.abs(domain.flat_nodes()[None, :] - z_arr[:, None]), axis=1)
    if np.any(d < spacings * spacing):
        warnings.warn(
            "evaluation point within %g node spacings of the boundary; "
            "Cauchy-transform accuracy is degraded" % spacings, stacklevel=3)


# -- Ahlfors map -----------------------------------------------------------

def ahlfors_map(sol: SzegoSolution, z):
    """f_a = S(.,a)/L(.,a); accepts interior points or a BoundaryPoint."""
    if isinstance(z, BoundaryPoint):
        s = sol.s_at_boundary_point(z)
        l = sol.l_at_boundary_point(z)
        return s / l
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    s = cauchy_transform(sol.domain, sol.s_boundary, z_arr)
    reg = cauchy_transform(sol.domain, garabedian_regular_part(sol), z_arr)
    # S/L through the pole of L: f = 2pi (z-a) S / (1 + 2pi (z-a) R)
    shift = TWO_PI * (z_arr - sol.a)
    vals = shift * s / (1.0 + shift * reg)
    return vals if np.ndim(z) else complex(vals[0])


def ahlfors_boundary_values(sol: SzegoSolution):
    return sol.s_boundary / sol.l_boundary


def ahlfors_derivative_at_base(sol: SzegoSolution, radius=None):
    """f_a'(a) by a small contour integral (independent of f'(a)=2*pi*S(a,a))."""
    if radius is None:
        radius = 0.25 * sol.domain.boundary_distance(sol.a)
    th = TWO_PI * np.arange(64) / 64
    ring = sol.a + radius * np.exp(1j * th)
    vals = ahlfors_map(sol, ring)
    return complex(np.mean(vals * np.exp(-1j * th)) / radius)


def ahlfors_degree(sol: SzegoSolution, w0=0.2 + 0.1j, eps_factor=4.0):
    """Argument-principle count of f = w0 over the offset boundary cycles."""
    f = lambda z: ahlfors_map(sol, z)
    return _argument_principle_count(sol.domain, f, w0, eps_factor)


def _argument_principle_count(domain, func, w0, eps_factor=4.0):
    total = 0.0 + 0.0j
    for j in range(1, domain.n_curves + 1):
        eps = min(eps_factor * domain.node_spacing(j), 0.5 * domain.reach(j))
        cyc = domain.offset_cycle(j, eps)
        vals = func(cyc.nodes) - w0
        dvals = spectral_derivative(vals)
        h = TWO_PI / len(vals)
        total += cyc.orientation * np.sum(dvals / vals) * h / (2.0j * np.pi)
    count = int(np.round(total.real))
    if abs(total - count) > 1e-3:
        raise SzegoError(
            f"argument-principle integral {total} is not close to an integer")
    return count


# -- zeros of S(.,a) -------------------------------------------------------

def find_szego_zeros(sol: SzegoSolution, newton_tol=1e-12, max_iter=20):
    """The n-1 interior zeros of S(.,a): moment location + Newton polish."""
    domain = sol.domain
    expected = domain.n_curves - 1
    if expected == 0:
        return []

    # power sums of the zeros from argument-principle moments on offset cycles
    moments = np.zeros(expected + 1, dtype=complex)
    for j in range(1, domain.n_curves + 1):
        eps = min(4.0 * domain.node_spacing(j), 0.5 * domain.reach(j))
        cyc = domain.offset_cycle(j, eps)
        s_vals = cauchy_transform(domain, sol.s_boundary, cyc.nodes)
        ds = spectral_derivative(s_vals)
        h = TWO_PI / len(s_vals)
        logd = ds / s_vals
        for k in range(expected + 1):
            moments[k] += (cyc.orientation * np.sum(cyc.nodes ** k * logd)
                           * h / (2.0j * np.pi))

    count = int(np.round(moments[0].real))
    if count != expected or abs(moments[0] - count) > 1e-3:
        raise DegenerateBasePointError(
            f"argument principle counts {moments[0]:.3f} zeros, expected "
            f"{expected}: choose different a")

    # Newton's identities: power sums -> elementary symmetric functions
    p = moments[1:]
    e = np.zeros(expected + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, expected + 1):
        acc = 0.0 + 0.0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * p[i - 1]
        e[k] = acc / k
    poly = [(-1) ** k * e[k] for k in range(expected + 1)]
    seeds = np.roots(poly) if expected > 0 else np.array([])

    zeros = []
    for seed in seeds:
        z = complex(seed)
        for _ in range(max_iter):
            s = cauchy_transform(domain, sol.s_boundary, z)[0]
            ds = cauchy_transform_derivative(domain, sol.s_boundary, z)[0]
            step = s / ds
            z = z - step
            if abs(step) < newton_tol:
                break
        zeros.append(z)

    _validate_zeros(sol, zeros, expected)
    return zeros


def _validate_zeros(sol, zeros, expected):
    domain = sol.domain
    spacing = domain.node_spacing()
    for z in zeros:
        try:
            inside = domain.contains(z)
        except GeometryError:
            inside = False
        if not inside:
            raise DegenerateBasePointError(
                f"zero {z} escaped the domain: choose different a")
        ds = cauchy_transform_derivative(domain, sol.s_boundary, z)[0]
        if abs(ds) < 1e-8:
            raise DegenerateBasePointError(
                f"zero {z} is not simple (|S'| = {abs(ds):.2e}): choose different a")
    for i in range(len(zeros)):
        for j in range(i + 1, len(zeros)):
            if abs(zeros[i] - zeros[j]) < max(1e-8, 0.1 * spacing):
                raise DegenerateBasePointError(
                    "zeros cluster pairwise: choose different a")
    if len(zeros) != expected:
        raise DegenerateBasePointError("zero count mismatch: choose different a")


# -- boundary-based fields (pole-stripped limit of the same equation) ------

@dataclass
class BoundaryBaseSolution:
    """S(.,b) and L(.,b) boundary data for a base point b on the boundary.

    The samples carry the genuine simple pole at b: S(x,b) = C_b(x) + rho(x)
    with rho smooth, L(x,b) = 1/(2pi(x-b)) + smooth.  The node coincident
    with b (if any) holds inf.
    """

    domain: Domain
    kmat: KernelMatrix
    point: BoundaryPoint
    location: complex
    rho: np.ndarray           # smooth part of S(.,b) at the nodes
    node_index: int           # flat index of a coincident node, or -1

    def cauchy_kernel_at(self, x, tangent):
        return np.conj(tangent / (x - self.location) / (2.0j * np.pi))

    def s_samples(self):
        x = self.domain.flat_nodes()
        tang = self.domain.flat_tangent()
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = self.cauchy_kernel_at(x, tang) + self.rho
        if self.node_index >= 0:
            vals[self.node_index] = np.inf
        return vals

    def l_samples(self):
        x = self.domain.flat_nodes()
        tang = self.domain.flat_tangent()
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (1.0 / (TWO_PI * (x - self.location))
                    + 1j * np.conj(self.rho) * np.conj(tang))
        if self.node_index >= 0:
            vals[self.node_index] = np.inf
        return vals

    def l_regular_samples(self):
        """L(.,b) minus its principal part 1/(2pi(.-b)): smooth, holomorphic."""
        tang = self.domain.flat_tangent()
        return 1j * np.conj(self.rho) * np.conj(tang)

    def s_at_boundary_point(self, bp: BoundaryPoint):
        z, tang = self.domain.point_and_tangent(bp)
        if abs(z - self.location) < 1e-13:
            raise SzegoError("S(.,b) has its pole at the requested point")
        return complex(self.cauchy_kernel_at(np.array([z]), np.array([tang]))[0]
                       + _interp_field(self.domain, self.rho, bp))

    def l_at_boundary_point(self, bp: BoundaryPoint):
        z, tang = self.domain.point_and_tangent(bp)
        if abs(z - self.location) < 1e-13:
            raise SzegoError("L(.,b) has its pole at the requested point")
        s = self.s_at_boundary_point(bp)
        return 1j * np.conj(s) * np.conj(tang)

    def inv_l_at_boundary_point(self, bp: BoundaryPoint):
        """1/L(p,b), regular through the pole at b (zero exactly there)."""
        z, tang = self.domain.point_and_tangent(bp)
        reg = 1j * np.conj(_interp_field(self.domain, self.rho, bp)) * np.conj(tang)
        shift = TWO_PI * (z - self.location)
        return shift / (1.0 + shift * reg)

    def l_interior(self, z):
        """L(z,b) for interior z via the pole-stripped Cauchy transform."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        reg = cauchy_transform(self.domain, self.l_regular_samples(), z_arr)
        vals = 1.0 / (TWO_PI * (z_arr - self.location)) + reg
        return vals if np.ndim(z) else complex(vals[0])


def solve_boundary_base(domain, bp: BoundaryPoint, kmat=None):
    """Kernel fields based at a boundary point, via the regularized system.

    For interior w the remainder rho_w = S(.,w) - C_w solves
    (I + A) rho_w = -A C_w; the right-hand side has a spectrally computable
    interior limit as w tends to b, so no singular solve is performed.
    """
    if kmat is None:
        kmat = KernelMatrix(domain)
    b, _ = domain.point_and_tangent(bp)
    x = domain.flat_nodes()
    tang = domain.flat_tangent()
    cw = domain.flat_complex_weights()
    n = domain.nodes_per_curve

    node_index = -1
    hits = np.where(np.abs(x - b) < 1e-12)[0]
    if len(hits) > 0:
        node_index = int(hits[0])
        b = complex(x[node_index])

    # A(x_m, b) column (smooth kernel, fine even when b sits at a node)
    diff_b = b - x
    if node_index >= 0:
        diff_b[node_index] = 1.0
    a_col = (np.conj(tang) / np.conj(diff_b) - _tangent_at(domain, bp) / diff_b) \
        / (2.0j * np.pi)
    if node_index >= 0:
        a_col[node_index] = 0.0

    # Sub_m = (1/2pi i) oint [phi_m(y) - phi_m(b)] / (y - b) dy,
    # phi_m = conj(A(x_m, .)); the integrand is smooth on each curve.
    phi = np.conj(kmat.kernel)          # phi[m, l] = conj(A(x_m, y_l))
    phi_b = np.conj(a_col)
    diff_y = x - b
    if node_index >= 0:
        diff_y[node_index] = 1.0
    integrand = (phi - phi_b[:, None]) / diff_y[None, :]
    if node_index >= 0:
        # removable point: limit is the parameter derivative over z'(t)
        c = bp.curve - 1
        block = phi[:, c * n:(c + 1) * n]
        dblock = spectral_derivative(block)
        col_in_curve = node_index - c * n
        dz_here = domain.dz[c, col_in_curve]  # plain parameter derivative
        integrand[:, node_index] = dblock[:, col_in_curve] / dz_here
    sub = integrand @ cw / (2.0j * np.pi)

    rhs = -(a_col + np.conj(sub))
    rho = kmat.solve(rhs)
    return BoundaryBaseSolution(domain=domain, kmat=kmat, point=bp,
                                location=b, rho=rho, node_index=node_index)


def _tangent_at(domain, bp: BoundaryPoint):
    _, tang = domain.point_and_tangent(bp)
    return tang


# -- rank structure of the kernel -------------------------------------------

def interior_grid(domain, count, seed=0, clearance=4.0):
    """Deterministic interior sample points, away from the boundary."""
    rng = np.random.default_rng(seed)
    flat = domain.flat_nodes()
    lo_x, hi_x = flat.real.min(), flat.real.max()
    lo_y, hi_y = flat.imag.min(), flat.imag.max()
    margin = clearance * domain.node_spacing()
    pts = []
    attempts = 0
    while len(pts) < count and attempts < 20000:
        attempts += 1
        z = complex(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
        try:
            if domain.contains(z) and domain.boundary_distance(z) > margin:
                pts.append(z)
        except GeometryError:
            continue
    if len(pts) < count:
        raise GeometryError("could not sample enough interior points")
    return np.array(pts)


def szego_rank_check(domain, a, n_left=None, n_right=None, seed=7, kmat=None):
    """sigma_{n+1}/sigma_1 of M[z,w] = (1 - f(z) conj(f(w))) S(z,w).

    The kernel identity behind the Ahlfors map forces numerical rank <= n.
    """
    n = domain.n_curves
    p = n_left or n + 5
    q = n_right or n + 5
    if p < n + 3 or q < n + 3:
        raise SzegoError("rank check grids need at least n+3 points")
    if kmat is None:
        kmat = KernelMatrix(domain)
    sol = solve_szego_boundary(domain, a, kmat=kmat, find_zeros=False)

    zs = interior_grid(domain, p, seed=seed)
    ws = interior_grid(domain, q, seed=seed + 1)

    fields = solve_at_points(kmat, ws)          # S(y, w_j) at the nodes
    s_zw = np.empty((p, q), dtype=complex)
    for j in range(q):
        s_zw[:, j] = cauchy_transform(domain, fields[:, j], zs)
    f_z = ahlfors_map(sol, zs)
    f_w = ahlfors_map(sol, ws)
    m = (1.0 - f_z[:, None] * np.conj(f_w)[None, :]) * s_zw
    sig = svdvals(m)
    return float(sig[n] / sig[0])
