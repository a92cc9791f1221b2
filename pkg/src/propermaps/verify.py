"""Certification: properness diagnostics, periods, and primitive pairs.

All residuals are scale-free (divided by the median boundary modulus) so the
reports are invariant under the positive-scale / imaginary-shift freedom of
the maps.  Certification contours are offset cycles at four node spacings.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .fourier import spectral_derivative
from .geom import BoundaryPoint
from .grunsky import GrunskyMap, build_interior
from .grunsky import degree as map_degree
from .harmonic import reflection_quotient_check
from .semigroup import boundary_multiplicity, _pole_points

TWO_PI = 2.0 * np.pi

DEFAULT_THRESHOLDS = {
    "properness": 1e-6,        # scale-free boundary |Re F| outside exclusion arcs
    "period": 1e-8,            # |Im oint dF| per cycle, scale-free
    "pole_indicator": 0.05,    # |1/F| at nodes adjacent to each pole
    "degree_match": 0,         # argument-principle degree must equal the target
    "exclusion": 0.2,          # arc half-width in radians
}


@dataclass
class PropernessReport:
    boundary_residual: float           # scale-free max |Re F| off the poles
    pole_indicators: list              # min |1/F| near each marked point
    degree: int
    target_degree: int
    multiplicities: list
    period_residuals: list
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))

    def passed(self):
        t = self.thresholds
        return (self.boundary_residual < t["properness"]
                and all(p < t["pole_indicator"] for p in self.pole_indicators)
                and all(r < t["period"] for r in self.period_residuals)
                and self.degree == self.target_degree
                and self.degree == sum(self.multiplicities))

    def to_json(self, extra=None):
        payload = asdict(self)
        payload["passed"] = self.passed()
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, default=float)


def reflection_real_check(fmap, half_width=None):
    """Scale-free properness residual: max |Re F| / median |F| off the poles."""
    if half_width is None:
        half_width = DEFAULT_THRESHOLDS["exclusion"]
    vals = fmap.boundary_nodes()
    mask = fmap.exclusion_mask(half_width) & np.isfinite(vals)
    med = float(np.median(np.abs(vals[mask])))
    return float(np.max(np.abs(vals[mask].real)) / med)


def period_residuals(fmap, eps_factor=4.0):
    """|Im of the spectrally integrated dF| around each offset cycle.

    For a pointwise-evaluated single-valued map this residual measures the
    smoothness/consistency of the evaluations along the cycle (the analytic
    period of the construction is enforced by the coefficient system).
    """
    domain = fmap.domain
    out = []
    for j in range(1, domain.n_curves + 1):
        eps = min(eps_factor * domain.node_spacing(j), 0.5 * domain.reach(j))
        cyc = domain.offset_cycle(j, eps)
        vals = fmap.interior(cyc.nodes)
        dvals = spectral_derivative(vals)
        h = TWO_PI / len(vals)
        period = np.sum(dvals) * h
        scale = max(float(np.max(np.abs(vals))), 1e-30)
        out.append(float(abs(period.imag)) / scale)
    return out


def pole_indicators(fmap):
    """min |1/F| over the nodes adjacent to each marked point (want small)."""
    domain = fmap.domain
    n = domain.nodes_per_curve
    vals = fmap.boundary_nodes()
    med = float(np.median(np.abs(vals[np.isfinite(vals)])))
    out = []
    for bp in _pole_points(fmap):
        m = int(np.round(bp.t / (TWO_PI / n)))
        idx = [(bp.curve - 1) * n + (m + d) % n for d in (-1, 0, 1)]
        finite = [abs(med / vals[i]) for i in idx if np.isfinite(vals[i])]
        out.append(float(min(finite)))
    return out


def certify(fmap, thresholds=None, w0=None):
    """Full properness report for a Grunsky map or proper-map combination."""
    t = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        t.update(thresholds)
    target = len(_pole_points(fmap))
    deg = map_degree(fmap, w0=w0)
    mults = [boundary_multiplicity(fmap, j)
             for j in range(1, fmap.domain.n_curves + 1)]
    return PropernessReport(
        boundary_residual=reflection_real_check(fmap, t["exclusion"]),
        pole_indicators=pole_indicators(fmap),
        degree=deg,
        target_degree=target,
        multiplicities=mults,
        period_residuals=period_residuals(fmap),
        thresholds=t)


@dataclass
class PrimitivePairCertificate:
    first_marked: list                 # (curve, t) of F1's poles
    second_marked: list                # (curve, t) of F2's poles
    values: list                       # F1 at F2's poles
    min_separation: float
    separated: bool


def _evaluate_on_curve(fmap, curve, ts):
    return np.array([fmap.boundary_point(BoundaryPoint(curve, t)) for t in ts])


def primitive_pair(domain, f1: GrunskyMap, ctx=None, candidates=64, seed=0,
                   min_separation=1e-6):
    """Choose a companion Grunsky map whose poles f1 separates.

    Sweeps candidate points on each curve (away from f1's own poles), picks
    the combination maximizing the minimum pairwise distance of the f1
    values, builds the second map through them, and certifies separation.
    """
    rng = np.random.default_rng(seed)
    chosen, chosen_vals = [], []
    for j in range(1, domain.n_curves + 1):
        ts = rng.uniform(0.0, TWO_PI, candidates)
        own = [bp.t for bp in f1.marked if bp.curve == j]
        keep = np.ones(len(ts), dtype=bool)
        for t0 in own:
            keep &= np.abs((ts - t0 + np.pi) % TWO_PI - np.pi) > 0.35
        ts = ts[keep]
        vals = _evaluate_on_curve(f1, j, ts)
        finite = np.isfinite(vals) & (np.abs(vals) < 1e6)
        ts, vals = ts[finite], vals[finite]
        if len(ts) == 0:
            raise ValueError(f"no usable candidates on curve {j}")
        if not chosen_vals:
            k = int(np.argmax(np.abs(vals)))
        else:
            prev = np.array(chosen_vals)
            dists = np.min(np.abs(vals[:, None] - prev[None, :]), axis=1)
            k = int(np.argmax(dists))
        chosen.append(BoundaryPoint(j, float(ts[k])))
        chosen_vals.append(complex(vals[k]))

    vals = np.array(chosen_vals)
    sep = float(np.min(np.abs(vals[:, None] - vals[None, :])
                       + np.diag([np.inf] * len(vals)))) if len(vals) > 1 else np.inf
    f2 = build_interior(domain, chosen, f1.base.a if f1.base_kind == "interior"
                        else domain.interior_anchor(), ctx=ctx)
    cert = certificate_for(f1, f2, min_separation)
    return f2, cert


def certificate_for(f1: GrunskyMap, f2: GrunskyMap, min_separation=1e-6):
    """Re-evaluate f1 at f2's poles and certify pairwise separation."""
    vals = []
    finite = True
    for bp in f2.marked:
        v = f1.boundary_point(bp)
        vals.append(complex(v))
        finite &= bool(np.isfinite(v)) and abs(v) < 1e9
    arr = np.array(vals)
    if len(arr) > 1:
        sep = float(np.min(np.abs(arr[:, None] - arr[None, :])
                           + np.diag([np.inf] * len(arr))))
    else:
        sep = float("inf")
    return PrimitivePairCertificate(
        first_marked=[(bp.curve, bp.t) for bp in f1.marked],
        second_marked=[(bp.curve, bp.t) for bp in f2.marked],
        values=vals,
        min_separation=sep,
        separated=finite and sep > min_separation)


def double_quotient_check(f_prime_fields):
    """max over j of the boundary imaginary part of F_j'/F_1'."""
    f1 = f_prime_fields[0]
    return max(reflection_quotient_check(f1, fj) for fj in f_prime_fields)
