"""``hilbert-geom`` command-line interface.

Exit codes: 0 success, 1 verification failure or invalid flat, 2 invalid
domain or input, 3 point not in the domain, 4 unknown face, 5 slicing plane
misses the domain.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import io, linalg
from .domain import Ellipsoid, Polytope, boundary_intersections, hilbert_distance
from .errors import (
    CoincidentPoints,
    DomainFormatError,
    FlatError,
    HilbertGeomError,
    NotInDomain,
    NotProperlyConvex,
    UnsupportedDomain,
)
from .faces import classify_pair, face_lattice
from .flats import flat_dual, validate_flat
from .projective import ProjPoint
from .verify import SUITE_NAMES, first_counterexample, run_suite

EXIT_FAIL = 1
EXIT_DOMAIN = 2
EXIT_MEMBERSHIP = 3
EXIT_FACE = 4
EXIT_PLANE = 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_domain(source):
    try:
        dom = io.load_domain(source)
        dom.validate()
        return dom
    except (DomainFormatError, NotProperlyConvex, ValueError) as exc:
        raise CliError(f"invalid domain: {exc}", EXIT_DOMAIN) from None


def _point(text, dom):
    try:
        return io.parse_point(text, dom.dim)
    except DomainFormatError as exc:
        raise CliError(f"invalid point: {exc}", EXIT_DOMAIN) from None


def _fmt_point(v, exact):
    """Homogeneous coordinates, scaled so the last entry is 1 when it is nonzero."""
    p = ProjPoint(v).normalized()
    c = p.coords
    if c[-1] != 0:
        c = c / c[-1]
    if exact and p.exact:
        return "[" + ", ".join(io.format_vector(c)) + "]"
    # adding 0.0 turns -0.0 into 0.0
    return "[" + ", ".join(f"{x + 0.0:.12f}" for x in np.round(linalg.to_float(c), 12)) + "]"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_dist(args):
    dom = _load_domain(args.domain)
    x, y = _point(args.x, dom), _point(args.y, dom)
    try:
        d = hilbert_distance(dom, x, y)
    except NotInDomain as exc:
        raise CliError(f"not in domain: {exc}", EXIT_MEMBERSHIP) from None
    lines = [f"{d:.12f}"]
    try:
        pair = boundary_intersections(dom, x, y)
        exact = isinstance(dom, Polytope)
        lines.append(f"z1 = {_fmt_point(pair.z1.coords, exact)}")
        lines.append(f"z2 = {_fmt_point(pair.z2.coords, exact)}")
    except CoincidentPoints:
        lines.append("z1 = -")
        lines.append("z2 = -")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_dual(args):
    dom = _load_domain(args.domain)
    try:
        dual = dom.dual()
        dual.validate()
        obj = io.domain_to_dict(dual)
    except (HilbertGeomError, ValueError) as exc:
        raise CliError(f"cannot dualize: {exc}", EXIT_DOMAIN) from None
    if isinstance(dual, Polytope):
        print(f"{len(dual.vertex_array)} vertices, {len(dual.facet_array)} facets", file=sys.stderr)
    io.write_json(obj, args.out)
    return 0


def _face(spec, lattice, dom):
    try:
        if spec.startswith("v:"):
            ids = [int(s) for s in spec[2:].split(",") if s.strip()]
            if any(i < 0 or i >= len(dom.vertex_array) for i in ids):
                raise KeyError(spec)
            return lattice.by_vertices(ids)
        return lattice[int(spec)]
    except (KeyError, ValueError, IndexError):
        raise CliError(f"unknown face {spec!r}", EXIT_FACE) from None


def cmd_classify(args):
    dom = _load_domain(args.domain)
    if not isinstance(dom, Polytope):
        raise CliError("face classification needs a polytope", EXIT_DOMAIN)
    lattice = face_lattice(dom)
    a = _face(args.face_a, lattice, dom)
    b = _face(args.face_b, lattice, dom)
    result = classify_pair(dom, a, b)
    line = result.case.value
    if result.meet is not None:
        line += f" meet={lattice.index(result.meet)} vertices={sorted(result.meet.vertex_ids)}"
    _emit(line + "\n", args.out)
    return 0


def cmd_lattice(args):
    dom = _load_domain(args.domain)
    if not isinstance(dom, Polytope):
        raise CliError("face lattices need a polytope", EXIT_DOMAIN)
    io.write_json(face_lattice(dom).to_dict(), args.out)
    return 0


def cmd_flats_check(args):
    dom = _load_domain(args.domain)
    try:
        verts, _ = io.load_flat(args.flat)
    except DomainFormatError as exc:
        raise CliError(f"invalid flat file: {exc}", EXIT_DOMAIN) from None
    lines = []
    try:
        flat = validate_flat(dom, verts)
    except (FlatError, UnsupportedDomain) as exc:
        _emit(f"invalid: {type(exc).__name__}: {exc}\n", args.out)
        return EXIT_FAIL
    lines.append("valid")
    lines.append(f"pseudo-dual: {_fmt_point(flat.pseudo_dual.coords, True)}")
    lines.append(f"carrier: {_fmt_point(flat.carrier.coords, True)}")
    lines.append(f"pseudo-dual in closure: {'yes' if flat.pseudo_dual_in_closure else 'no'}")
    if args.dual:
        fd = flat_dual(dom, flat)
        lines.append("dual vertices: " + ", ".join(_fmt_point(v.coords, True) for v in fd.vertices))
        lines.append(f"dual carrier: {_fmt_point(fd.carrier.coords, True)}")
        lines.append(f"dual pseudo-dual: {_fmt_point(fd.pseudo_dual.coords, True)}")
        status = "yes" if fd.valid else "no (" + "; ".join(fd.issues) + ")"
        lines.append(f"dual valid in dual domain: {status}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args):
    report = run_suite(args.suite, samples=args.samples, seed=args.seed, tol=args.tol, jobs=args.jobs)
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    _emit(text, args.out)
    if not report["passed"]:
        print(json.dumps(first_counterexample(report), default=str), file=sys.stderr)
        return EXIT_FAIL
    return 0


# ---------------------------------------------------------------------------
# slices


def _plane_basis(spec, dom):
    try:
        rows = [io.parse_point(p, dom.dim) for p in spec.split(";")]
    except DomainFormatError as exc:
        raise CliError(f"invalid plane: {exc}", EXIT_DOMAIN) from None
    if len(rows) != 3 or linalg.rank(np.array(rows, dtype=object)) != 3:
        raise CliError("plane needs three independent points", EXIT_DOMAIN)
    return linalg.to_float(np.array(rows, dtype=object)).T


def _plane_center(dom, basis):
    """A representative (eta = 1) of a point of the domain inside the plane."""
    eta = dom._eta_float
    if isinstance(dom, Polytope):
        from scipy.optimize import linprog

        f = dom._facets_float @ basis
        # maximize s subject to f a >= s, eta(B a) = 1, s <= 1
        c = np.zeros(4)
        c[3] = -1.0
        a_ub = np.hstack([-f, np.ones((len(f), 1))])
        res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(f)),
                      A_eq=[np.append(eta @ basis, 0.0)], b_eq=[1.0],
                      bounds=[(None, None)] * 3 + [(None, 1.0)], method="highs")
        if not res.success or res.x[3] <= 1e-9:
            return None
        p = basis @ res.x[:3]
    else:
        q = basis.T @ dom._form_float @ basis
        w, vecs = np.linalg.eigh(q)
        if np.sum(w < 0) != 1:
            return None
        p = basis @ vecs[:, 0]
    val = eta @ p
    if val == 0:
        return None
    p = p / val
    return p if dom.contains(p) else None


def _slice_geometry(dom, basis, samples, flat=None):
    center = _plane_center(dom, basis)
    if center is None:
        raise CliError("plane misses the domain", EXIT_PLANE)
    eta = dom._eta_float
    # orthonormal basis of the plane's directions inside ker(eta)
    dirs = basis - np.outer(center, eta @ basis)
    u, s, _ = np.linalg.svd(dirs, full_matrices=False)
    e1, e2 = u[:, 0], u[:, 1]

    def coords(p):
        p = p / (eta @ p)
        # round away float noise so output is stable and free of -0.0
        return (round(float((p - center) @ e1), 9) + 0.0, round(float((p - center) @ e2), 9) + 0.0)

    boundary = []
    for k in range(samples):
        th = 2 * math.pi * k / samples
        v = math.cos(th) * e1 + math.sin(th) * e2
        _, hi = dom.line_interval(center, v)
        boundary.append(coords(center + hi * v))
    shapes = {"boundary": boundary}
    if flat is not None:
        car = linalg.to_float(flat.carrier.coords)
        # carrier ∩ plane: points center + x e1 + y e2 with car(.) = 0
        a, b, c0 = car @ e1, car @ e2, car @ center
        if abs(a) + abs(b) > 1e-14:
            n = np.array([a, b]) / (a * a + b * b)
            base = center - c0 * (n[0] * e1 + n[1] * e2)
            direction = -b * e1 + a * e2
            lo, hi = dom.line_interval(base, direction)
            if lo < hi and math.isfinite(lo) and math.isfinite(hi):
                p, q = base + lo * direction, base + hi * direction
                shapes["flat"] = [coords(p), coords(q)]
                hat = linalg.to_float(flat.pseudo_dual.coords)
                in_plane = linalg.rank(np.column_stack([basis, hat]), tol=1e-12) == 3
                if in_plane and abs(eta @ hat) > 1e-14:
                    mid = (p + q) / 2
                    hat_rep = hat / (eta @ hat)
                    lo2, hi2 = dom.line_interval(mid, hat_rep - mid)
                    shapes["normal"] = [coords(mid + lo2 * (hat_rep - mid)), coords(hat_rep)]
                    shapes["pseudo_dual"] = [coords(hat_rep)]
    return shapes


def _svg(shapes):
    pts = [p for pl in shapes.values() for p in pl]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad

    def xy(p):
        return f"{p[0]:.6f},{-p[1] + 0.0:.6f}"

    width = 512
    height = int(round(width * (y1 - y0) / (x1 - x0)))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0:.6f} {-y1:.6f} {x1 - x0:.6f} {y1 - y0:.6f}">',
        f'<polygon fill="#eef3fb" stroke="#1b2a41" stroke-width="{pad / 8:.6f}" points="'
        + " ".join(xy(p) for p in shapes["boundary"]) + '"/>',
    ]
    if "flat" in shapes:
        a, b = shapes["flat"]
        out.append(f'<line x1="{a[0]:.6f}" y1="{-a[1] + 0.0:.6f}" x2="{b[0]:.6f}" y2="{-b[1] + 0.0:.6f}" '
                   f'stroke="#1f6feb" stroke-width="{pad / 5:.6f}"/>')
    if "normal" in shapes:
        a, b = shapes["normal"]
        out.append(f'<line x1="{a[0]:.6f}" y1="{-a[1] + 0.0:.6f}" x2="{b[0]:.6f}" y2="{-b[1] + 0.0:.6f}" '
                   f'stroke="#cf222e" stroke-width="{pad / 8:.6f}" stroke-dasharray="{pad / 3:.6f}"/>')
    if "pseudo_dual" in shapes:
        (p,) = shapes["pseudo_dual"]
        out.append(f'<circle cx="{p[0]:.6f}" cy="{-p[1] + 0.0:.6f}" r="{pad / 3:.6f}" fill="#cf222e"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _csv(shapes):
    rows = ["kind,index,x,y"]
    for kind in ("boundary", "flat", "normal", "pseudo_dual"):
        for i, p in enumerate(shapes.get(kind, [])):
            rows.append(f"{kind},{i},{p[0]:.9f},{p[1]:.9f}")
    return "\n".join(rows) + "\n"


def cmd_slice(args):
    dom = _load_domain(args.domain)
    if args.plane is None:
        if dom.dim != 2:
            raise CliError("--plane is required when d > 2", EXIT_DOMAIN)
        basis = np.eye(3)
    else:
        basis = _plane_basis(args.plane, dom)
    flat = None
    if args.flat:
        try:
            verts, _ = io.load_flat(args.flat)
            flat = validate_flat(dom, verts)
        except (DomainFormatError, FlatError, UnsupportedDomain) as exc:
            raise CliError(f"invalid flat: {exc}", EXIT_DOMAIN) from None
    shapes = _slice_geometry(dom, basis, args.samples, flat)
    fmt = "csv" if args.out and args.out.endswith(".csv") else "svg"
    _emit(_csv(shapes) if fmt == "csv" else _svg(shapes), args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--tol", type=float, default=None,
                        help="float tolerance (default 1e-9 or $HILBERT_GEOM_TOL)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sampling")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="hilbert-geom",
                                description="Hilbert geometry of properly convex domains.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dist", parents=[common], help="Hilbert distance between two points")
    s.add_argument("domain", help="domain JSON file or stock:NAME")
    s.add_argument("x", help="comma-separated rationals, affine or homogeneous")
    s.add_argument("y")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("dual", parents=[common], help="write the dual domain as JSON")
    s.add_argument("domain")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("classify", parents=[common], help="relation between two faces")
    s.add_argument("domain")
    s.add_argument("face_a", help="face id from `lattice`, or v:i,j,... vertex ids")
    s.add_argument("face_b")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("lattice", parents=[common], help="face lattice as JSON")
    s.add_argument("domain")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("flats-check", parents=[common], help="validate a flat, print its pseudo-dual")
    s.add_argument("domain")
    s.add_argument("flat", help="flat JSON file")
    s.add_argument("--dual", action="store_true", help="also print the dual flat")
    s.set_defaults(func=cmd_flats_check)

    s = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    s.add_argument("suite", choices=SUITE_NAMES)
    s.add_argument("--samples", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("slice", parents=[common], help="SVG/CSV picture of a 2-D slice")
    s.add_argument("domain")
    s.add_argument("--plane", default=None, help="three points 'p1;p2;p3' spanning the plane")
    s.add_argument("--flat", default=None, help="flat JSON file to draw with its normal line")
    s.add_argument("--samples", type=int, default=512, help="boundary samples (default 512)")
    s.set_defaults(func=cmd_slice)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None:
        os.environ["HILBERT_GEOM_TOL"] = repr(args.tol)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
