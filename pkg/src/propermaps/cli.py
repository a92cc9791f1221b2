"""Command-line front end.

Subcommands: domain validate, ahlfors, grunsky build|eval|certify,
semigroup combine|add-point|remove-point, verify.  Exit codes: 0 thresholds
met, 1 validation or threshold failure, 2 no admissible base point after
jittered retries, 3 stale serialized artifact.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .geom import BoundaryPoint, GeometryError, load_domain
from .grunsky import GrunskyError, SolverContext, build_boundary, build_interior
from .portrait import write_grid_csv, write_phase_portrait
from .semigroup import (CombineReport, SemigroupError, add_point, combine,
                        remove_point)
from .serialize import (StaleArtifactError, TamperedArtifactError,
                        dumps_canonical, grunsky_to_dict, map_from_dict,
                        proper_to_dict)
from .szego import (DegenerateBasePointError, ahlfors_boundary_values,
                    ahlfors_degree, ahlfors_derivative_at_base,
                    solve_szego_boundary)
from .verify import DEFAULT_THRESHOLDS, certify

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NO_BASE = 2
EXIT_STALE = 3


@dataclass
class RunConfig:
    domain_path: str
    nodes: int = None
    marked: list = field(default_factory=list)
    base: str = "auto"
    out: str = None
    grid: tuple = (64, 64)
    seed: int = 0
    thresholds: dict = field(default_factory=dict)


def _parse_point(text):
    try:
        curve, t = text.split(":")
        return BoundaryPoint(int(curve), float(t))
    except Exception as exc:
        raise argparse.ArgumentTypeError(
            f"expected curve:t, got {text!r}") from exc


def _parse_threshold(text):
    key, value = text.split("=", 1)
    return key, float(value)


def _add_common(p, need_out=False):
    p.add_argument("--domain", required=True, help="domain spec JSON")
    p.add_argument("--nodes", type=int, default=None,
                   help="trapezoid nodes per curve (power of two)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, required=need_out,
                   help="output directory for artifacts")
    p.add_argument("--threshold", action="append", default=[],
                   type=_parse_threshold, metavar="KEY=VALUE")


def _load(args):
    domain = load_domain(args.domain, nodes=args.nodes)
    n = domain.nodes_per_curve
    if not 64 <= n <= 8192:
        raise GeometryError("node count must lie in [64, 8192]")
    thresholds = dict(DEFAULT_THRESHOLDS)
    thresholds.update(dict(args.threshold))
    return domain, thresholds


def _out_dir(args):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    return args.out


def _stamp(data, domain):
    data["domain_hash"] = domain.content_hash()
    data["nodes"] = domain.nodes_per_curve
    return data


def _pick_base(args, domain, ctx, retries=5):
    """Interior base from --base, retrying with jittered points if degenerate."""
    spec = args.base
    if spec.startswith("boundary:"):
        _, curve, t = spec.split(":")
        return ("boundary", BoundaryPoint(int(curve), float(t)))
    if spec == "auto":
        z = domain.interior_anchor()
    else:
        x, y = spec.split(",")
        z = complex(float(x), float(y))
    rng = np.random.default_rng(args.seed)
    for attempt in range(retries):
        try:
            solve_szego_boundary(domain, z, kmat=ctx.kmat)
            return ("interior", z)
        except DegenerateBasePointError as exc:
            print(f"base point {z} rejected ({exc}); retrying with jitter",
                  file=sys.stderr)
            z = z + 0.05 * domain.diameter * complex(rng.standard_normal(),
                                                     rng.standard_normal())
    return (None, None)


def cmd_domain_validate(args):
    try:
        domain, _ = _load(args)
    except (GeometryError, ValueError) as exc:
        print(f"invalid domain: {exc}")
        return EXIT_FAIL
    print(f"domain ok: {domain.n_curves} curves, N={domain.nodes_per_curve}, "
          f"hash={domain.content_hash()[:16]}")
    return EXIT_OK


def cmd_ahlfors(args):
    domain, thresholds = _load(args)
    ctx = SolverContext(domain)
    kind, base = _pick_base(args, domain, ctx)
    if kind is None:
        print("no admissible base point after retries", file=sys.stderr)
        return EXIT_NO_BASE
    if kind != "interior":
        print("the Ahlfors map needs an interior base point", file=sys.stderr)
        return EXIT_FAIL
    sol = solve_szego_boundary(domain, base, kmat=ctx.kmat)
    fb = ahlfors_boundary_values(sol)
    modulus_residual = float(np.max(np.abs(np.abs(fb) - 1.0)))
    deriv = ahlfors_derivative_at_base(sol)
    report = _stamp({
        "base": [base.real, base.imag],
        "boundary_modulus_residual": modulus_residual,
        "derivative_at_base": [deriv.real, deriv.imag],
        "degree": ahlfors_degree(sol),
        "zeros_of_szego": [[z.real, z.imag] for z in sol.zeros],
        "equation_residual": sol.residual,
    }, domain)
    ok = (modulus_residual < thresholds.get("ahlfors_modulus", 1e-8)
          and report["degree"] == domain.n_curves
          and deriv.real > 0 and abs(deriv.imag) < 1e-8 * deriv.real)
    report["passed"] = ok
    print(dumps_canonical(report), end="")
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, "ahlfors.json"), "w") as fh:
            fh.write(dumps_canonical(report))
    return EXIT_OK if ok else EXIT_FAIL


def _build_map(args, domain, ctx):
    marked = list(args.b or [])
    kind, base = _pick_base(args, domain, ctx)
    if kind is None:
        return None
    if kind == "boundary":
        return build_boundary(domain, marked, base, ctx=ctx)
    return build_interior(domain, marked, base, ctx=ctx)


def cmd_grunsky_build(args):
    domain, thresholds = _load(args)
    ctx = SolverContext(domain)
    try:
        gmap = _build_map(args, domain, ctx)
    except (GrunskyError, GeometryError, ValueError) as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if gmap is None:
        print("no admissible base point after 5 jittered retries", file=sys.stderr)
        return EXIT_NO_BASE
    report = certify(gmap, thresholds)
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, "map.json"), "w") as fh:
            fh.write(dumps_canonical(grunsky_to_dict(gmap)))
        with open(os.path.join(out, "report.json"), "w") as fh:
            fh.write(report.to_json(extra={
                "domain_hash": domain.content_hash(),
                "nodes": domain.nodes_per_curve,
                "weights": [float(w) for w in gmap.weights]}))
        w, h = args.grid
        write_grid_csv(os.path.join(out, "grid.csv"), gmap, w, h)
        if args.ppm:
            write_phase_portrait(os.path.join(out, "portrait.ppm"), gmap, w, h)
    print(report.to_json(extra={"weights": [float(w) for w in gmap.weights]}))
    return EXIT_OK if report.passed() else EXIT_FAIL


def _read_map(path, domain, ctx, check_hash=True):
    with open(path) as fh:
        data = json.load(fh)
    return map_from_dict(domain, data, ctx=ctx, check_hash=check_hash), data


def cmd_grunsky_eval(args):
    domain, _ = _load(args)
    ctx = SolverContext(domain)
    try:
        gmap, _ = _read_map(args.map, domain, ctx)
    except StaleArtifactError as exc:
        print(f"stale artifact: {exc}", file=sys.stderr)
        return EXIT_STALE
    out = _out_dir(args) or "."
    w, h = args.grid
    write_grid_csv(os.path.join(out, "grid.csv"), gmap, w, h)
    if args.ppm:
        write_phase_portrait(os.path.join(out, "portrait.ppm"), gmap, w, h)
    print(f"wrote grid.csv ({w}x{h}) to {out}")
    return EXIT_OK


def cmd_grunsky_certify(args):
    domain, thresholds = _load(args)
    ctx = SolverContext(domain)
    try:
        gmap, _ = _read_map(args.map, domain, ctx)
    except StaleArtifactError as exc:
        print(f"stale artifact: {exc}", file=sys.stderr)
        return EXIT_STALE
    except TamperedArtifactError as exc:
        print(f"artifact failed re-validation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = certify(gmap, thresholds)
    print(report.to_json())
    return EXIT_OK if report.passed() else EXIT_FAIL


def cmd_semigroup(args):
    domain, thresholds = _load(args)
    ctx = SolverContext(domain)
    try:
        if args.action == "combine":
            coeffs = [float(c) for c in args.c.split(",")] if args.c else [1.0] * len(args.map)
            if len(coeffs) != len(args.map):
                print("need one coefficient per term", file=sys.stderr)
                return EXIT_FAIL
            terms = []
            for path, ck in zip(args.map, coeffs):
                gmap, _ = _read_map(path, domain, ctx)
                terms.append((gmap, ck))
            result = combine(terms, ctx=ctx)
        else:
            pmap, _ = _read_map(args.map[0], domain, ctx)
            if isinstance(pmap, CombineReport):
                return EXIT_FAIL
            if not hasattr(pmap, "terms"):
                pmap = combine([(pmap, 1.0)], ctx=ctx)
            if args.action == "add-point":
                result = add_point(pmap, args.point, args.c3, ctx=ctx)
            else:
                result, consts = remove_point(pmap, args.point, ctx=ctx)
                print(f"constants: c0={consts[0]:.17g} c={consts[1]:.17g}")
    except StaleArtifactError as exc:
        print(f"stale artifact: {exc}", file=sys.stderr)
        return EXIT_STALE
    except (SemigroupError, TamperedArtifactError, GrunskyError) as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_FAIL

    if isinstance(result, CombineReport):
        print(json.dumps({"valid": False, "violations": result.violations}, indent=2))
        return EXIT_FAIL
    report = certify(result, thresholds)
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, "proper_map.json"), "w") as fh:
            fh.write(dumps_canonical(proper_to_dict(result)))
        with open(os.path.join(out, "report.json"), "w") as fh:
            fh.write(report.to_json(extra={"domain_hash": domain.content_hash(),
                                           "nodes": domain.nodes_per_curve}))
    print(report.to_json())
    return EXIT_OK if report.passed() else EXIT_FAIL


def cmd_verify(args):
    domain, thresholds = _load(args)
    ctx = SolverContext(domain)
    with open(args.map) as fh:
        data = json.load(fh)
    if data.get("domain_hash") != domain.content_hash():
        # a differing node count is a rebuild request, any other change is stale
        probe = load_domain(args.domain, nodes=data.get("nodes", 256))
        if probe.content_hash() != data.get("domain_hash"):
            print("stale artifact: domain hash mismatch", file=sys.stderr)
            return EXIT_STALE
    try:
        fmap = map_from_dict(domain, data, ctx=ctx, check_hash=False)
    except TamperedArtifactError as exc:
        print(f"artifact failed re-validation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = certify(fmap, thresholds)
    extra = {"domain_hash": domain.content_hash(), "nodes": domain.nodes_per_curve}
    if data.get("nodes") != domain.nodes_per_curve and data.get("kind") == "grunsky":
        stored = np.asarray(data["weights"], dtype=float)
        extra["convergence_delta"] = float(np.max(np.abs(stored - fmap.weights)))
    print(report.to_json(extra=extra))
    return EXIT_OK if report.passed() else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="propermaps",
                                description="proper holomorphic maps of "
                                            "multiply connected domains")
    sub = p.add_subparsers(dest="command", required=True)

    pd = sub.add_parser("domain", help="domain utilities")
    pds = pd.add_subparsers(dest="action", required=True)
    pv = pds.add_parser("validate")
    _add_common(pv)
    pv.set_defaults(func=cmd_domain_validate)

    pa = sub.add_parser("ahlfors", help="solve the Szego system, report the Ahlfors map")
    _add_common(pa)
    pa.add_argument("--base", default="auto")
    pa.set_defaults(func=cmd_ahlfors)

    pg = sub.add_parser("grunsky", help="build/evaluate/certify Grunsky maps")
    pgs = pg.add_subparsers(dest="action", required=True)
    pb = pgs.add_parser("build")
    _add_common(pb)
    pb.add_argument("--b", action="append", type=_parse_point, metavar="CURVE:T",
                    help="marked point, one per curve (repeatable)")
    pb.add_argument("--base", default="auto")
    pb.add_argument("--grid", nargs=2, type=int, default=(64, 64), metavar=("W", "H"))
    pb.add_argument("--ppm", action="store_true", help="write a phase portrait")
    pb.set_defaults(func=cmd_grunsky_build)
    pe = pgs.add_parser("eval")
    _add_common(pe)
    pe.add_argument("--map", required=True)
    pe.add_argument("--grid", nargs=2, type=int, default=(64, 64), metavar=("W", "H"))
    pe.add_argument("--ppm", action="store_true")
    pe.set_defaults(func=cmd_grunsky_eval)
    pc = pgs.add_parser("certify")
    _add_common(pc)
    pc.add_argument("--map", required=True)
    pc.set_defaults(func=cmd_grunsky_certify)

    ps = sub.add_parser("semigroup", help="combine maps, add or remove poles")
    pss = ps.add_subparsers(dest="action", required=True)
    for name in ("combine", "add-point", "remove-point"):
        px = pss.add_parser(name)
        _add_common(px)
        px.add_argument("--map", action="append", required=True,
                        help="map JSON (repeatable for combine)")
        if name == "combine":
            px.add_argument("--c", default=None, help="comma-separated coefficients")
        if name == "add-point":
            px.add_argument("--point", required=True, type=_parse_point)
            px.add_argument("--c3", type=float, default=1.0)
        if name == "remove-point":
            px.add_argument("--point", required=True, type=_parse_point)
        px.set_defaults(func=cmd_semigroup)

    pvf = sub.add_parser("verify", help="rebuild a serialized map and certify it")
    _add_common(pvf)
    pvf.add_argument("--map", required=True)
    pvf.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
