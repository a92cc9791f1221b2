"""Deterministic JSON serialization of maps and reports.

Artifacts embed the domain content hash and node count; floats are printed
at 17 significant digits so identical runs produce byte-identical files.
"""

import json

import numpy as np

from .geom import BoundaryPoint
from .grunsky import GrunskyMap, SolverContext, build_boundary, build_interior
from .semigroup import ProperMap, combine


class StaleArtifactError(ValueError):
    """Serialized artifact does not match the domain it is replayed against."""


class TamperedArtifactError(ValueError):
    """Stored derived quantities disagree with the rebuilt ones."""


def _fmt(obj):
    if isinstance(obj, float):
        return float("%.17g" % obj)
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    return obj


def dumps_canonical(data):
    return json.dumps(_fmt(data), sort_keys=True, indent=2) + "\n"


def _point_dict(bp: BoundaryPoint):
    return {"curve": bp.curve, "t": bp.t}


def _base_dict(gmap: GrunskyMap):
    if gmap.base_kind == "interior":
        a = gmap.base.a
        return {"kind": "interior", "point": [a.real, a.imag]}
    bp = gmap.base.point
    return {"kind": "boundary", "curve": bp.curve, "t": bp.t}


def grunsky_to_dict(gmap: GrunskyMap):
    return {
        "kind": "grunsky",
        "domain_hash": gmap.domain.content_hash(),
        "nodes": gmap.domain.nodes_per_curve,
        "marked": [_point_dict(bp) for bp in gmap.marked],
        "base": _base_dict(gmap),
        "weights": [float(w) for w in gmap.weights],
        "scale": float(gmap.scale),
        "shift": float(gmap.shift),
    }


def grunsky_from_dict(domain, data, ctx=None, check_hash=True, weight_tol=1e-6):
    if check_hash and data["domain_hash"] != domain.content_hash():
        raise StaleArtifactError("domain hash mismatch")
    if ctx is None:
        ctx = SolverContext(domain)
    marked = [BoundaryPoint(p["curve"], p["t"]) for p in data["marked"]]
    base = data["base"]
    if base["kind"] == "interior":
        gmap = build_interior(domain, marked, complex(*base["point"]),
                              c=data["scale"], C=data["shift"], ctx=ctx)
    else:
        gmap = build_boundary(domain, marked, BoundaryPoint(base["curve"], base["t"]),
                              c=data["scale"], C=data["shift"], ctx=ctx)
    stored = np.asarray(data["weights"], dtype=float)
    if len(stored) != len(gmap.weights) or \
            np.max(np.abs(stored - gmap.weights)) > weight_tol * np.max(np.abs(gmap.weights)):
        raise TamperedArtifactError(
            "stored coefficient weights disagree with the rebuilt ones")
    return gmap


def proper_to_dict(pmap: ProperMap):
    return {
        "kind": "proper_map",
        "domain_hash": pmap.domain.content_hash(),
        "nodes": pmap.domain.nodes_per_curve,
        "terms": [dict(grunsky_to_dict(g), coefficient=float(c))
                  for g, c in pmap.terms],
        "decomposition": [dict(_point_dict(bp), weight=float(w))
                          for bp, w in pmap.decomposition],
    }


def proper_from_dict(domain, data, ctx=None, check_hash=True):
    if check_hash and data["domain_hash"] != domain.content_hash():
        raise StaleArtifactError("domain hash mismatch")
    if ctx is None:
        ctx = SolverContext(domain)
    terms = []
    for td in data["terms"]:
        gmap = grunsky_from_dict(domain, td, ctx=ctx, check_hash=check_hash)
        terms.append((gmap, float(td["coefficient"])))
    result = combine(terms, ctx=ctx)
    if isinstance(result, ProperMap):
        stored = {(d["curve"], round(d["t"], 9)): d["weight"]
                  for d in data["decomposition"]}
        rebuilt = {(bp.curve, round(bp.t, 9)): w for bp, w in result.decomposition}
        if set(stored) != set(rebuilt):
            raise TamperedArtifactError("stored decomposition points disagree")
        for key, w in stored.items():
            if abs(w - rebuilt[key]) > 1e-6 * max(abs(w), abs(rebuilt[key])):
                raise TamperedArtifactError("stored decomposition weights disagree")
        return result
    raise TamperedArtifactError(
        f"stored term list does not combine to a valid map: {result.violations}")


def map_from_dict(domain, data, ctx=None, check_hash=True):
    if data.get("kind") == "grunsky":
        return grunsky_from_dict(domain, data, ctx=ctx, check_hash=check_hash)
    if data.get("kind") == "proper_map":
        return proper_from_dict(domain, data, ctx=ctx, check_hash=check_hash)
    raise ValueError(f"unknown artifact kind {data.get('kind')!r}")
