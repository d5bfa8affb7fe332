"""Invariant suites behind ``hilbert-geom verify``.

A suite is a list of checks.  Sampled checks are split into fixed-size
shards; shard ``i`` of check ``j`` in suite ``k`` draws from
``make_rng(seed, k, j, i)``, so results do not depend on ``--jobs``.
Every check reports a count, a failure count, the largest error seen and
the first counterexample in shard order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg, stock
from .domain import Polytope, dual_domain, finsler_norm, hilbert_distance
from .errors import NotGeneralPosition
from .faces import Case, classify_pair, dual_face, face_lattice, is_angular, polar_vertex_map
from .flats import (
    epsilon_projection_check,
    flat_dual,
    normal_project,
    phi_map,
    polyhedral_ratio_bounds,
    simplex_distance,
    standard_neighborhood,
    validate_flat,
)
from .group import (
    GeneratorSet,
    certify_preserves,
    isometry_check,
    orbit,
    precise_invariance_check,
    stabilizes_flat,
    translation_report,
)
from .projective import ProjMap, ProjPoint, apply
from .rng import make_rng
from .sampling import interior_points, random_projmap, rational_interior_points

SHARD = 250
SUITE_NAMES = ("metric", "duality", "faces", "projection", "simplex", "group")
DEFAULT_SAMPLES = {"metric": 1000, "duality": 20, "faces": 0, "projection": 10000,
                   "simplex": 10000, "group": 200}


@dataclass
class Check:
    name: str
    invariant: str
    func: str
    kwargs: dict = field(default_factory=dict)
    sampled: bool = True
    tol_scale: float = 1.0


def _stats(count=0, failures=0, max_error=0.0, counterexample=None, **extra):
    out = {"count": count, "failures": failures, "max_error": max_error,
           "counterexample": counterexample}
    out.update(extra)
    return out


class _Tracker:
    def __init__(self, tol):
        self.tol = tol
        self.count = 0
        self.failures = 0
        self.max_error = 0.0
        self.counterexample = None

    def add(self, error, witness, failed=None):
        self.count += 1
        error = float(error)
        if error > self.max_error or math.isnan(error):
            self.max_error = error if not math.isnan(error) else math.inf
        bad = (error > self.tol or math.isnan(error)) if failed is None else failed
        if bad:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = witness() if callable(witness) else witness

    def result(self, **extra):
        return _stats(self.count, self.failures, self.max_error, self.counterexample, **extra)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


@lru_cache(maxsize=None)
def _domain(name, seed=0):
    if name == "random3":
        return stock.random_polytope(3, 12, make_rng(seed, 99))
    return stock.STOCK[name]()


@lru_cache(maxsize=None)
def _corner_flat(d=3, s=Fraction(1, 2)):
    return validate_flat(stock.simplex(d), stock.corner_flat_vertices(d, 0, s))


# ---------------------------------------------------------------------------
# metric


def check_metric_axioms(rng, n, tol, domain, seed):
    dom = _domain(domain, seed)
    t = _Tracker(tol)
    pts = interior_points(dom, rng, 3 * n)
    for x, y, z in zip(pts[0::3], pts[1::3], pts[2::3]):
        dxy = hilbert_distance(dom, x, y)
        dyx = hilbert_distance(dom, y, x)
        dyz = hilbert_distance(dom, y, z)
        dxz = hilbert_distance(dom, x, z)
        dxx = hilbert_distance(dom, x, x)
        err = max(abs(dxy - dyx), dxz - dxy - dyz, abs(dxx))
        t.add(err, lambda: _jsonable([x, y, z]), failed=err > tol or dxy <= 0)
    return t.result()


def check_invariance(rng, n, tol, domain):
    dom = _domain(domain)
    t = _Tracker(tol)
    per_map = 50
    done = 0
    while done < n:
        g = random_projmap(dom.dim, rng)
        gdom = dom.transform(g)
        gm = linalg.to_float(g.matrix)
        k = min(per_map, n - done)
        pts = interior_points(dom, rng, 2 * k)
        for x, y in zip(pts[0::2], pts[1::2]):
            err = abs(hilbert_distance(gdom, gm @ x, gm @ y) - hilbert_distance(dom, x, y))
            t.add(err, lambda: _jsonable([g.matrix, x, y]))
        done += k
    return t.result()


def check_klein(rng, n, tol):
    t = _Tracker(tol)
    for d in (2, 3):
        ball = stock.unit_ball(d)
        origin = np.zeros(d + 1)
        origin[d] = 1.0
        for k in range(1, 10):
            r = k / 10
            y = origin.copy()
            y[0] = r
            err = abs(hilbert_distance(ball, origin, y) - math.atanh(r))
            t.add(err, {"dim": d, "r": r})
    return t.result()


def check_finsler(rng, n, tol, domain):
    dom = _domain(domain)
    chart = dom.chart
    h = 1e-6
    t = _Tracker(tol)
    # finite-difference error grows like h F(x, v)^2, so keep x well inside
    for x in interior_points(dom, rng, n, margin=0.5):
        u = chart.coords(x)
        v = rng.standard_normal(dom.dim)
        v /= np.linalg.norm(v)
        y = chart.lift(u + h * v)
        quotient = hilbert_distance(dom, x, y) / h
        err = abs(quotient - finsler_norm(dom, x, v))
        t.add(err, lambda: _jsonable([x, v]))
    return t.result()


# ---------------------------------------------------------------------------
# duality


def _vertex_set(poly):
    return {tuple(ProjPoint(v).normalized().coords) for v in poly.vertex_array}


def _involution_case(poly):
    back = dual_domain(dual_domain(poly))
    return _vertex_set(back) == _vertex_set(poly)


def check_involution_stock(rng, n, tol):
    t = _Tracker(0.0)
    cases = {f"simplex{d}": stock.simplex(d) for d in (2, 3, 4)}
    cases.update({"cube3": stock.cube(3), "cross3": stock.cross_polytope(3), "square": stock.square()})
    for name, poly in cases.items():
        ok = _involution_case(poly)
        t.add(0.0 if ok else 1.0, name)
    return t.result()


def check_involution_random(rng, n, tol):
    t = _Tracker(0.0)
    for i in range(n):
        d = 2 + i % 3
        poly = stock.random_polytope(d, d + 5, rng)
        ok = _involution_case(poly)
        t.add(0.0 if ok else 1.0, lambda: _jsonable(poly.vertex_array))
    return t.result()


def check_simplex_self_dual(rng, n, tol):
    t = _Tracker(0.0)
    for d in (1, 2, 3, 4):
        s = stock.simplex(d)
        sd = dual_domain(s)
        ok = sd.is_simplex and len(sd.facet_array) == d + 1
        if ok:
            # the projective map sending the dual's vertices to the primal's
            g = ProjMap(s.vertex_array.T.dot(linalg.inverse(sd.vertex_array.T)))
            moved = sd.transform(g)
            ok = _vertex_set(moved) == _vertex_set(s) and {
                tuple(h.normalized().coords) for h in moved.facets} == {
                tuple(h.normalized().coords) for h in s.facets}
        t.add(0.0 if ok else 1.0, d)
    for d in (2, 3):
        ball = stock.unit_ball(d)
        inv = dual_domain(ball).form
        ok = ProjPoint(inv.ravel()).same_as(ProjPoint(ball.form.ravel()))
        t.add(0.0 if ok else 1.0, f"ball{d}")
    sq = dual_domain(stock.square())
    expected = {tuple(ProjPoint(v).normalized().coords)
                for v in ([1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1])}
    t.add(0.0 if _vertex_set(sq) == expected else 1.0, "square")
    return t.result()


# ---------------------------------------------------------------------------
# faces

def _oracle_case(a, b):
    """Brute force on vertex sets."""
    va, vb = a.vertex_ids, b.vertex_ids
    if va == vb:
        return Case.EQUAL, None
    if va < vb or vb < va:
        return Case.BOUNDARY_INCLUSION, None
    meet = va & vb
    if not meet:
        return Case.DISJOINT, None
    return Case.PROPER_MEETING, meet


def check_lattice_counts(rng, n, tol):
    t = _Tracker(0.0)
    expected = {"simplex3": {2: 4, 1: 6, 0: 4}, "cube3": {2: 6, 1: 12, 0: 8},
                "cross3": {2: 8, 1: 12, 0: 6}, "interval": {0: 2}}
    for name, counts in expected.items():
        got = face_lattice(_domain(name)).counts()
        t.add(0.0 if got == counts else 1.0, {"domain": name, "counts": got})
    return t.result()


def check_chotomy(rng, n, tol):
    t = _Tracker(0.0)
    for name in ("simplex3", "cube3", "cross3"):
        poly = _domain(name)
        lat = face_lattice(poly)
        for a in lat:
            for b in lat:
                got = classify_pair(poly, a, b)
                case, meet = _oracle_case(a, b)
                ok = got.case == case and (meet is None or got.meet.vertex_ids == meet)
                t.add(0.0 if ok else 1.0, {"domain": name, "a": sorted(a.vertex_ids), "b": sorted(b.vertex_ids)})
    return t.result()


def check_inclusion_reversal(rng, n, tol):
    t = _Tracker(0.0)
    for name in ("simplex3", "cube3", "cross3"):
        poly = _domain(name)
        lat = face_lattice(poly)
        for k in lat:
            for big in lat:
                if k.vertex_ids <= big.vertex_ids:
                    dk = dual_face(poly, k).face.vertex_ids
                    dl = dual_face(poly, big).face.vertex_ids
                    t.add(0.0 if dl <= dk else 1.0,
                          {"domain": name, "K": sorted(k.vertex_ids), "L": sorted(big.vertex_ids)})
    return t.result()


def check_double_dual(rng, n, tol):
    t = _Tracker(0.0)
    for name in ("simplex3", "cube3", "cross3"):
        poly = _domain(name)
        polar = poly.polar
        back = polar_vertex_map(poly)
        for k in face_lattice(poly):
            kk = dual_face(polar, dual_face(poly, k).face).face
            ids = {back[i] for i in kk.vertex_ids}
            t.add(0.0 if ids == set(k.vertex_ids) else 1.0, {"domain": name, "K": sorted(k.vertex_ids)})
    return t.result()


def check_angular(rng, n, tol):
    t = _Tracker(0.0)
    for name in ("simplex3", "cube3", "cross3", "square", "simplex2"):
        poly = _domain(name)
        for k in face_lattice(poly):
            ok = is_angular(poly, k) and k.dim + k.dual_dim == poly.dim - 1
            t.add(0.0 if ok else 1.0, {"domain": name, "K": sorted(k.vertex_ids)})
    return t.result()


# ---------------------------------------------------------------------------
# projection and flats


def check_nonexpansive(rng, n, tol):
    flat = _corner_flat()
    dom = flat.domain
    t = _Tracker(tol)
    pts = interior_points(dom, rng, 2 * n, margin=0.0)
    for x, y in zip(pts[0::2], pts[1::2]):
        px = normal_project(flat, x).coords
        py = normal_project(flat, y).coords
        excess = hilbert_distance(dom, px, py) - hilbert_distance(dom, x, y)
        t.add(max(excess, 0.0), lambda: _jsonable([x, y]))
    return t.result()


def check_idempotent(rng, n, tol):
    flat = _corner_flat()
    t = _Tracker(0.0)
    for y in rational_interior_points(flat.domain, rng, max(n // 10, 1)):
        p = normal_project(flat, y)
        ok = normal_project(flat, p.coords).same_as(p) and np.dot(flat.carrier.coords, p.coords) == 0
        t.add(0.0 if ok else 1.0, lambda: _jsonable(y))
    return t.result()


def check_pseudo_dual(rng, n, tol):
    t = _Tracker(0.0)
    for d in (2, 3, 4):
        dom = stock.simplex(d)
        for vertex in range(d + 1):
            for s in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 3), Fraction(3, 4)):
                flat = validate_flat(dom, stock.corner_flat_vertices(d, vertex, s))
                expected = ProjPoint(np.eye(d + 1, dtype=int)[vertex])
                ok = flat.pseudo_dual.same_as(expected)
                fd = flat_dual(dom, flat)
                back = flat_dual(dom.polar, fd)
                ok = ok and back.carrier.same_as(flat.carrier) and all(
                    any(a.same_as(b) for b in flat.vertices) for a in back.vertices)
                t.add(0.0 if ok else 1.0, {"d": d, "vertex": vertex, "s": str(s)})
    return t.result()


def check_neighborhood(rng, n, tol):
    """Both directions of the level-set description of the hull.

    Hull points (an orbit point plus a positive multiple of a flat point)
    must test inside; every point testing inside must split as such a sum.
    """
    flat = _corner_flat()
    dom = flat.domain
    nb = standard_neighborhood(dom, flat, [Fraction(4), Fraction(1), Fraction(1), Fraction(1)])
    t = _Tracker(1e-9)
    frame = linalg.to_float(nb.frame)
    verts = linalg.to_float(flat.vertex_matrix())
    ux, tx = nb.coordinates(nb.point.coords)
    ux, tx = linalg.to_float(ux), float(tx)
    for y in interior_points(dom, rng, max(n // 5, 1), margin=0.0):
        lam = np.exp(rng.normal(size=dom.dim))
        lam /= np.prod(lam) ** (1 / dom.dim)
        orb = frame @ np.append(ux * lam, tx)
        h = orb + rng.uniform(0.01, 1.0) * (verts @ rng.dirichlet(np.ones(dom.dim)))
        if dom.contains(h):
            t.add(0.0 if nb.contains(h) else 1.0, lambda: _jsonable(h))
        if nb.contains(y):
            o, f = nb.hull_decomposition(y)
            ou, ot = nb.coordinates(o)
            cf = np.linalg.solve(frame, f)
            level = float(nb._invariant(linalg.to_float(ou), float(ot)))
            rep = linalg.to_float(dom.representative(y))
            err = max(abs(level / float(nb.level) - 1), abs(cf[-1]), np.abs(o + f - rep).max())
            t.add(err, lambda: _jsonable(y), failed=err > 1e-9 or not np.all(cf[:-1] > 0))
    return t.result()


def check_closedness(rng, n, tol):
    t = _Tracker(0.0)
    dom = stock.simplex(3)
    for k in range(2, 12):
        s = Fraction(1, 2) - Fraction(1, 2 * k)
        validate_flat(dom, stock.corner_flat_vertices(3, 0, s))
    limit = validate_flat(dom, stock.corner_flat_vertices(3, 0, Fraction(1, 2)))
    t.add(0.0 if limit.pseudo_dual.same_as(ProjPoint([1, 0, 0, 0])) else 1.0, "limit 1/2")
    try:
        validate_flat(dom, stock.corner_flat_vertices(3, 0, Fraction(0)))
        t.add(1.0, "degenerate limit accepted")
    except NotGeneralPosition:
        t.add(0.0, "degenerate limit")
    return t.result()


def check_epsilon(rng, n, tol):
    t = _Tracker(0.0)
    dom = stock.simplex(3)
    flat = _corner_flat()
    inner = validate_flat(dom, stock.corner_flat_vertices(3, 0, Fraction(1, 4)))
    rep = epsilon_projection_check(dom, flat, inner, samples=20, seed=int(rng.integers(1 << 30)), eps=10.0)
    t.add(0.0 if rep["fraction"] == 1.0 else 1.0, rep)
    return t.result()


# ---------------------------------------------------------------------------
# simplex


def check_simplex_formula(rng, n, tol, d):
    dom = stock.simplex(d)
    t = _Tracker(tol)
    pts = interior_points(dom, rng, 2 * n, margin=0.0)
    for x, y in zip(pts[0::2], pts[1::2]):
        err = abs(hilbert_distance(dom, x, y) - simplex_distance(x, y))
        t.add(err, lambda: _jsonable([x, y]))
    return t.result()


def check_bilipschitz(rng, n, tol, d):
    dom = stock.simplex(d)
    lo, hi = polyhedral_ratio_bounds(d)
    t = _Tracker(tol)
    rmin, rmax = math.inf, 0.0
    pts = interior_points(dom, rng, 2 * n, margin=0.0)
    for x, y in zip(pts[0::2], pts[1::2]):
        e = np.linalg.norm(phi_map(x) - phi_map(y))
        if e == 0:
            continue
        r = hilbert_distance(dom, x, y) / e
        rmin, rmax = min(rmin, r), max(rmax, r)
        excess = max(lo - r, r - hi, 0.0)
        t.add(excess, lambda: _jsonable([x, y]))
    return t.result(ratio_min=rmin, ratio_max=rmax, bound_lo=lo, bound_hi=hi)


def check_phi(rng, n, tol):
    t = _Tracker(tol)
    for d in (1, 2, 3):
        for _ in range(max(n // 10, 1)):
            x = np.exp(rng.normal(size=d + 1))
            u = phi_map(x)
            back = x / np.prod(x) ** (1 / (d + 1))
            err = max(abs(u.sum()), np.abs(np.exp(u) - back).max(), np.abs(phi_map(3.7 * x) - u).max())
            t.add(err, lambda: _jsonable(x))
    return t.result()


# ---------------------------------------------------------------------------
# group


def _diag_element(rng, d):
    a = rng.normal(size=d + 1)
    a -= a.mean()
    return a, ProjMap(np.diag(np.exp(a)))


def check_certified_isometry(rng, n, tol):
    t = _Tracker(tol)
    for d in (2, 3):
        dom = stock.simplex(d)
        perm = rng.permutation(d + 1)
        diag = rng.integers(1, 6, size=d + 1)
        m = np.diag(diag).astype(int)[perm]
        g = certify_preserves(dom, ProjMap(m))
        rep = isometry_check(dom, g, samples=max(n // 4, 1), seed=int(rng.integers(1 << 30)), tol=tol)
        t.add(rep["max_deviation"], {"d": d, "matrix": m.tolist()}, failed=not rep["passed"])
    th = float(rng.uniform(0, 2 * math.pi))
    rot = np.array([[math.cos(th), -math.sin(th), 0], [math.sin(th), math.cos(th), 0], [0, 0, 1]])
    ball = stock.unit_ball(2)
    g = certify_preserves(ball, ProjMap(rot))
    rep = isometry_check(ball, g, samples=max(n // 4, 1), seed=int(rng.integers(1 << 30)), tol=tol)
    t.add(rep["max_deviation"], {"rotation": th}, failed=not rep["passed"] or g.certificate != "exact")
    return t.result()


def check_stabilizer_fixes_hat(rng, n, tol):
    flat = _corner_flat()
    dom = flat.domain
    nb = standard_neighborhood(dom, flat, [Fraction(4), Fraction(1), Fraction(1), Fraction(1)])
    t = _Tracker(0.0)
    elements = [nb.h_element([Fraction(2), Fraction(1, 2), Fraction(1)]),
                nb.h_element([Fraction(3), Fraction(1), Fraction(1, 3)])]
    for perm in ([0, 2, 1, 3], [0, 1, 3, 2], [0, 3, 1, 2], [1, 0, 2, 3]):
        elements.append(ProjMap(np.eye(4, dtype=int)[perm]))
    for g in elements:
        if stabilizes_flat(g, flat):
            ok = apply(g, flat.pseudo_dual).same_as(flat.pseudo_dual)
            t.add(0.0 if ok else 1.0, lambda: _jsonable(g.matrix))
    return t.result()


def check_translation(rng, n, tol):
    t = _Tracker(1e-6)
    for d in (2, 3):
        dom = stock.simplex(d)
        for _ in range(20):
            a, g = _diag_element(rng, d)
            closed = translation_report(dom, g).value
            numeric = translation_report(dom, g, method="numeric", seed=int(rng.integers(1 << 30))).value
            err = max(abs(closed - numeric), abs(closed - 0.5 * (a.max() - a.min())))
            t.add(err, {"d": d, "exponents": a.tolist()})
        ident = translation_report(dom, ProjMap.identity(d)).value
        t.add(abs(ident), {"d": d, "identity": True})
    return t.result()


def check_orbit_level(rng, n, tol):
    flat = _corner_flat()
    dom = flat.domain
    x = [Fraction(4), Fraction(1), Fraction(1), Fraction(1)]
    nb = standard_neighborhood(dom, flat, x)
    gens = GeneratorSet([nb.h_element([Fraction(2), Fraction(1, 2), Fraction(1)]),
                         nb.h_element([Fraction(1), Fraction(3), Fraction(1, 3)])], max_length=3)
    t = _Tracker(0.0)
    for p in orbit(gens, np.array(x, dtype=object)):
        ok = nb.invariant(p.point.coords) == nb.level
        t.add(0.0 if ok else 1.0, p.word)
    return t.result()


def check_precise_invariance(rng, n, tol):
    flat = _corner_flat()
    dom = flat.domain
    nb = standard_neighborhood(dom, flat, [Fraction(4), Fraction(1), Fraction(1), Fraction(1)])
    t = _Tracker(0.0)
    seed = int(rng.integers(1 << 30))
    lattice = GeneratorSet([nb.h_element([Fraction(2), Fraction(1, 2), Fraction(1)]),
                            nb.h_element([Fraction(1), Fraction(3), Fraction(1, 3)])])
    rep = precise_invariance_check(dom, nb, lattice, samples=max(n // 4, 20), seed=seed)
    t.add(0.0 if rep["passed"] else 1.0, rep["violations"][:1])
    swap = GeneratorSet([ProjMap(np.eye(4, dtype=int)[[1, 0, 2, 3]])])
    rep = precise_invariance_check(dom, nb, swap, samples=max(n // 4, 20), seed=seed, max_length=1)
    t.add(0.0 if rep["passed"] else 1.0, rep["violations"][:1])
    return t.result()


# ---------------------------------------------------------------------------
# registry

_METRIC_DOMAINS = ("simplex2", "simplex3", "simplex4", "cube3", "random3", "ball2", "ball3")

SUITES = {
    "metric": [
        *[Check(f"axioms[{name}]", "symmetry, triangle inequality, d(x,x)=0 and d>0 off the diagonal",
                "check_metric_axioms", {"domain": name}) for name in _METRIC_DOMAINS],
        *[Check(f"projective_invariance[{name}]", "d_{g.Omega}(gx, gy) = d_Omega(x, y)",
                "check_invariance", {"domain": name}) for name in ("simplex3", "cube3", "ball3")],
        Check("klein", "unit ball: d(0, r e) = artanh(r) at r = 0.1..0.9", "check_klein",
              sampled=False, tol_scale=0.1),
        *[Check(f"finsler[{name}]", "|d(x, x + h v)/h - F(x, v)| <= 1e-4 at h = 1e-6",
                "check_finsler", {"domain": name}, tol_scale=1e5) for name in ("simplex3", "cube3", "ball2")],
    ],
    "duality": [
        Check("involution[stock]", "(Omega*)* = Omega exactly", "check_involution_stock", sampled=False),
        Check("involution[random]", "(Omega*)* = Omega exactly on random rational polytopes",
              "check_involution_random"),
        Check("self_dual", "simplex and ball are self-dual; square dual is the diamond",
              "check_simplex_self_dual", sampled=False),
    ],
    "faces": [
        Check("lattice_counts", "face counts of the simplex, cube, octahedron, segment",
              "check_lattice_counts", sampled=False),
        Check("four_chotomy", "exactly one case per ordered pair, meet = vertex-set intersection",
              "check_chotomy", sampled=False),
        Check("inclusion_reversal", "K in L implies L* in K*", "check_inclusion_reversal", sampled=False),
        Check("double_dual", "(K*)* corresponds to K", "check_double_dual", sampled=False),
        Check("angular", "dim K + dim K* = d - 1 for every face of a polytope", "check_angular",
              sampled=False),
    ],
    "projection": [
        Check("non_expansive", "d(pi x, pi y) <= d(x, y) + tol for the corner flat of the 3-simplex",
              "check_nonexpansive"),
        Check("idempotent", "pi(pi(y)) = pi(y) exactly", "check_idempotent", {}, True),
        Check("pseudo_dual", "corner flats have F^ = the cut vertex; flat duality is an involution",
              "check_pseudo_dual", sampled=False),
        Check("standard_neighborhood", "level-set membership agrees with the hull construction",
              "check_neighborhood"),
        Check("closedness", "limits of corner-flat families validate; degenerate limits are rejected",
              "check_closedness", sampled=False),
        Check("epsilon_projection", "normal lines of a flat meet a parallel corner flat",
              "check_epsilon", sampled=False),
    ],
    "simplex": [
        *[Check(f"closed_form[d={d}]", "cross-ratio distance = ½(max - min) of log ratios",
                "check_simplex_formula", {"d": d}, tol_scale=0.1) for d in (2, 3)],
        *[Check(f"bilipschitz[d={d}]", "d_H / |phi x - phi y| within the analytic bounds",
                "check_bilipschitz", {"d": d}) for d in (2, 3)],
        Check("phi", "phi sums to zero, inverts by exp and ignores scale", "check_phi"),
    ],
    "group": [
        Check("certified_isometry", "certified elements move distances by at most tol",
              "check_certified_isometry", sampled=False),
        Check("stabilizer_fixes_pseudo_dual", "stabilizes_flat(g, F) implies g F^ = F^",
              "check_stabilizer_fixes_hat", sampled=False),
        Check("translation_length", "closed form = numerical infimum within 1e-6; identity gives 0",
              "check_translation", sampled=False),
        Check("orbit_level", "H_F-lattice orbits keep the neighborhood level exactly",
              "check_orbit_level", sampled=False),
        Check("precise_invariance", "neighborhood is preserved by its lattice and moved off by a swap",
              "check_precise_invariance", sampled=False),
    ],
}


def _run_shard(args):
    func, kwargs, seed, suite_idx, check_idx, shard, n, tol = args
    rng = make_rng(seed, suite_idx, check_idx, shard)
    return globals()[func](rng, n, tol, **kwargs)


def _merge(parts):
    out = _stats()
    extra = {}
    for p in parts:
        out["count"] += p["count"]
        out["failures"] += p["failures"]
        out["max_error"] = max(out["max_error"], p["max_error"])
        if out["counterexample"] is None and p["counterexample"] is not None:
            out["counterexample"] = p["counterexample"]
        for k, v in p.items():
            if k in out:
                continue
            if k.endswith("_min"):
                extra[k] = min(extra.get(k, math.inf), v)
            elif k.endswith("_max"):
                extra[k] = max(extra.get(k, -math.inf), v)
            else:
                extra[k] = v
    out.update(extra)
    return out


def run_suite(name: str, samples: int | None = None, seed: int = 0, tol: float | None = None,
              jobs: int = 1) -> dict:
    """Run one suite; the report's ``passed`` is True iff every check passed."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    base_tol = linalg.resolve_tol(tol)
    n_total = DEFAULT_SAMPLES[name] if samples is None else int(samples)
    suite_idx = SUITE_NAMES.index(name)
    tasks = []
    layout = []
    for j, check in enumerate(SUITES[name]):
        ctol = base_tol * check.tol_scale
        kwargs = dict(check.kwargs)
        if check.func == "check_metric_axioms":
            kwargs["seed"] = seed
        if check.sampled:
            if check.func == "check_involution_random":
                shards = [(0, n_total)]
            else:
                shards = [(i, min(SHARD, n_total - i * SHARD)) for i in range(max(math.ceil(n_total / SHARD), 1))]
        else:
            shards = [(0, n_total)]
        idxs = []
        for shard, n in shards:
            idxs.append(len(tasks))
            tasks.append((check.func, kwargs, seed, suite_idx, j, shard, n, ctol))
        layout.append((check, ctol, idxs))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_shard, tasks))
    else:
        results = [_run_shard(task) for task in tasks]
    checks = []
    for check, ctol, idxs in layout:
        merged = _merge([results[i] for i in idxs])
        merged.update({"name": check.name, "invariant": check.invariant, "tol": ctol,
                       "passed": merged["failures"] == 0})
        checks.append(merged)
    return {
        "suite": name,
        "seed": seed,
        "samples": n_total,
        "tol": base_tol,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def first_counterexample(report: dict):
    for c in report["checks"]:
        if not c["passed"]:
            return {"check": c["name"], "counterexample": c["counterexample"], "max_error": c["max_error"]}
    return None
