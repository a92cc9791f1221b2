"""Period matrix of the marked boundary points and the positive weights.

lambda[i][j] = -i F_i'(b_j) T(b_j) is real with negative off-diagonal entries
and zero column sums; the reduced (n-1)-system for the weights a_j satisfies
the hypotheses of the positivity lemma, so the solve is checked against them
before and after.
"""

from dataclasses import dataclass

import numpy as np

from .fourier import trig_interp
from .geom import BoundaryPoint, Domain


class PeriodError(ValueError):
    pass


@dataclass
class PeriodMatrix:
    domain: Domain
    marked: list                 # one BoundaryPoint per curve, curve order
    values: np.ndarray           # real n x n matrix
    imag_residual: float


@dataclass
class CoefficientVector:
    weights: np.ndarray          # a_1 .. a_n with a_n = 1
    residual: float


def _field_at(field, domain, bp: BoundaryPoint):
    n = domain.nodes_per_curve
    block = field.samples.reshape(domain.n_curves, n)[bp.curve - 1]
    return complex(trig_interp(block, bp.t))


def period_matrix(fields, marked, imag_tol=1e-6):
    """Assemble lambda[i][j] = -i F_i'(b_j) T(b_j) from the derivative fields."""
    domain = fields[0].domain
    n = domain.n_curves
    if len(fields) != n:
        raise PeriodError(f"need {n} derivative fields, got {len(fields)}")
    if len(marked) != n or sorted(bp.curve for bp in marked) != list(range(1, n + 1)):
        raise PeriodError("marked points must supply exactly one point per curve")
    marked = sorted(marked, key=lambda bp: bp.curve)

    lam = np.empty((n, n), dtype=complex)
    for j, bp in enumerate(marked):
        _, tang = domain.point_and_tangent(bp)
        for i in range(n):
            lam[i, j] = -1j * _field_at(fields[i], domain, bp) * tang
    imag_residual = float(np.max(np.abs(lam.imag))) if n > 1 else 0.0
    if imag_residual > imag_tol:
        raise PeriodError(
            f"period matrix has imaginary residue {imag_residual:.2e}; "
            "derivative fields are inconsistent")
    values = lam.real.copy()
    mat = PeriodMatrix(domain=domain, marked=list(marked), values=values,
                       imag_residual=imag_residual)
    _check_structure(mat)
    return mat


def _check_structure(p: PeriodMatrix, col_tol=1e-8):
    lam = p.values
    n = lam.shape[0]
    if n == 1:
        return
    off = lam[~np.eye(n, dtype=bool)]
    if np.any(off >= 0):
        raise PeriodError("off-diagonal period entries must be negative")
    if np.any(np.diag(lam) <= 0):
        raise PeriodError("diagonal period entries must be positive")
    colsum = np.max(np.abs(lam.sum(axis=0))) / np.max(np.abs(lam))
    if colsum > col_tol:
        raise PeriodError(f"period columns do not sum to zero ({colsum:.2e})")


def solve_coefficients(p: PeriodMatrix, residual_tol=1e-10):
    """Weights a_1..a_n (a_n = 1) making all periods of the combination vanish."""
    lam = p.values
    n = lam.shape[0]
    if n == 1:
        return CoefficientVector(weights=np.array([1.0]), residual=0.0)

    sub = lam[:n - 1, :n - 1]
    rhs = -lam[:n - 1, n - 1]
    # positivity-lemma hypotheses (should hold for any valid period matrix)
    off = sub[~np.eye(n - 1, dtype=bool)]
    if off.size and np.any(off >= 0):
        raise PeriodError("reduced system off-diagonal not negative: data corrupt")
    if np.any(sub.sum(axis=0) <= 0):
        raise PeriodError("reduced system column sums not positive: data corrupt")
    if np.any(rhs <= 0):
        raise PeriodError("reduced system right side not positive: data corrupt")

    a = np.linalg.solve(sub, rhs)
    residual = float(np.max(np.abs(sub @ a - rhs)) / np.max(np.abs(rhs)))
    if residual > residual_tol:
        raise PeriodError(f"coefficient system residual {residual:.2e} too large")
    if np.any(a <= 0):
        raise PeriodError("coefficient solution not positive: data corrupt")
    return CoefficientVector(weights=np.append(a, 1.0), residual=residual)


def cramer_coefficients(p: PeriodMatrix):
    """Determinant-ratio route to the same weights (independent cross-check)."""
    lam = p.values
    n = lam.shape[0]
    if n < 2:
        raise PeriodError("Cramer route needs n >= 2")
    sub = lam[:n - 1, :n - 1]
    rhs = -lam[:n - 1, n - 1]
    det = np.linalg.det(sub)
    if det == 0:
        raise PeriodError("singular coefficient system: data corrupt")
    a = np.empty(n - 1)
    for j in range(n - 1):
        mod = sub.copy()
        mod[:, j] = rhs
        a[j] = np.linalg.det(mod) / det
    residual = float(np.max(np.abs(sub @ a - rhs)) / max(np.max(np.abs(rhs)), 1e-300))
    return CoefficientVector(weights=np.append(a, 1.0), residual=residual)
