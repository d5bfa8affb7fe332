"""Properly embedded codimension-1 simplices ("flats") and tools around them.

A flat in a d-dimensional domain is the open hull of d boundary points in
general position whose interior lies in the domain while every proper
face lies in the boundary.  For polytopes all checks run in exact rational
arithmetic.

Frame convention: the supports ``phi_i`` are indexed by the vertex they
miss, i.e. ``phi_i`` supports the (d-2)-face opposite vertex ``w_i``.
The pseudo-dual ``F^`` is the common zero of all ``phi_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import linalg
from .domain import ConvexDomain, Ellipsoid, Polytope, _raw, hilbert_distance
from .errors import (
    FaceNotInBoundary,
    FrameDegenerate,
    InteriorEscapes,
    NoCommonPoint,
    NonPositiveCoordinate,
    NonUniqueSupport,
    NotGeneralPosition,
    NotInDomain,
    NotOnBoundary,
    PointOnCarrier,
    ProjectionUndefined,
    UnsupportedDomain,
    VertexNotOnBoundary,
)
from .faces import face_of_point
from .projective import Hyperplane, ProjMap, ProjPoint

PSEUDO_DUAL_RTOL = 1e-10


@dataclass(frozen=True)
class Flat:
    """A codimension-1 simplex in ``domain``.

    ``vertices`` are representatives on the domain's chart sheet,
    ``supports[i]`` is the supporting hyperplane of the face opposite
    ``vertices[i]``.  ``valid`` is False for objects built by duality that
    were not (or could not be) validated in their own domain; ``issues``
    then says why.
    """

    vertices: tuple
    carrier: Hyperplane
    pseudo_dual: ProjPoint
    supports: tuple
    domain: ConvexDomain = field(repr=False)
    valid: bool = True
    issues: tuple = ()
    pseudo_dual_in_closure: bool = False

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def exact(self) -> bool:
        return all(v.exact for v in self.vertices)

    def vertex_matrix(self) -> np.ndarray:
        """Vertex representatives as columns."""
        rows = [v.coords for v in self.vertices]
        dtype = object if self.exact else float
        return np.array(rows, dtype=dtype).T

    def barycenter(self) -> ProjPoint:
        return ProjPoint(np.sum(self.vertex_matrix(), axis=1) / len(self.vertices))

    def point(self, weights) -> ProjPoint:
        """Point with the given barycentric weights (normalized to sum 1)."""
        w = np.asarray(weights)
        if self.exact and w.dtype.kind in "iuO":
            w = linalg.to_exact(w)
            m = self.vertex_matrix()
        else:
            w = linalg.to_float(w)
            m = linalg.to_float(self.vertex_matrix())
        return ProjPoint(m.dot(w / w.sum()))

    def to_dict(self) -> dict:
        return {"vertices": [[str(x) for x in v.coords] for v in self.vertices]}


def _vertex_reps(domain, vertices):
    exact = isinstance(domain, Polytope)
    reps = []
    for v in vertices:
        raw = _raw(v)
        if exact:
            raw = linalg.to_exact(raw)
        r = domain.representative(raw, exact=exact)
        if r is None:
            raise VertexNotOnBoundary("vertex lies at infinity of the domain's chart",
                                      witness=ProjPoint(raw))
        reps.append(r)
    return reps


def _nullvector(rows, exact, what):
    m = np.array(rows, dtype=object if exact else float)
    if exact:
        basis = linalg.nullspace(m)
        if len(basis) != 1:
            return None
        return basis[0]
    _, s, vt = np.linalg.svd(m)
    if s.size < m.shape[0] or s[-1] <= PSEUDO_DUAL_RTOL * s[0]:
        return None
    return vt[-1]


def _grid(d, n):
    """Barycentric weights with denominator n (all compositions of n)."""
    for cuts in combinations(range(n + d - 1), d - 1):
        prev = -1
        parts = []
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(n + d - 2 - prev)
        yield parts


def _grid_level(d, samples):
    n = 1
    while math.comb(n + d - 1, d - 1) < samples:
        n += 1
    return n


def validate_flat(domain: ConvexDomain, vertices, samples: int = 1000) -> Flat:
    """Check that the d given points span a flat and return it.

    Raises NotGeneralPosition, VertexNotOnBoundary, InteriorEscapes,
    FaceNotInBoundary, NonUniqueSupport or NoCommonPoint.  Polytopes are
    checked exactly; for other domains the interior is tested on a
    barycentric grid of about ``samples`` points.
    """
    d = domain.dim
    vertices = list(vertices)
    if len(vertices) != d:
        raise NotGeneralPosition(f"a flat in dimension {d} needs {d} vertices")
    if isinstance(domain, Ellipsoid):
        _validate_sampled(domain, vertices, samples)
        raise UnsupportedDomain("ellipsoids are strictly convex; pseudo-duals are defined for polytopes")
    if not isinstance(domain, Polytope):
        raise UnsupportedDomain("unsupported domain kind")
    reps = _vertex_reps(domain, vertices)
    if linalg.rank(np.array(reps, dtype=object)) < d:
        raise NotGeneralPosition("vertices are not in general position")
    for r in reps:
        if not domain.in_closure(r) or domain.contains(r):
            raise VertexNotOnBoundary("vertex is not on the boundary", witness=ProjPoint(r))
    # the open simplex lies in the domain iff its barycenter does: a facet
    # vanishing there vanishes on every vertex
    bary = np.sum(np.array(reps, dtype=object), axis=0) / d
    if not domain.contains(bary):
        raise InteriorEscapes("hull interior meets the boundary", witness=ProjPoint(bary))
    supports = []
    for i in range(d):
        face = [reps[j] for j in range(d) if j != i]
        center = np.sum(np.array(face, dtype=object), axis=0) / len(face)
        try:
            k = face_of_point(domain, center)
        except NotOnBoundary:
            raise FaceNotInBoundary("a (d-2)-face of the simplex enters the domain",
                                    witness=ProjPoint(center)) from None
        for f in face:
            if not all(np.dot(domain.facet_array[j], f) == 0 for j in k.facet_ids):
                raise FaceNotInBoundary("simplex face is not inside one face of the domain",
                                        witness=ProjPoint(f))
        if k.dual_dim != 0:
            raise NonUniqueSupport(f"face opposite vertex {i} has a {k.dual_dim}-dimensional family of supports",
                                   witness=sorted(k.facet_ids))
        supports.append(Hyperplane(domain.facet_array[min(k.facet_ids)]))
    hat = _nullvector([s.coords for s in supports], True, "pseudo-dual")
    if hat is None:
        raise NoCommonPoint("supports do not meet in a single point")
    carrier = _nullvector(reps, True, "carrier")
    hat = _orient(domain, hat)
    in_closure = domain.in_closure(hat)
    return Flat(tuple(ProjPoint(r) for r in reps), Hyperplane(carrier), ProjPoint(hat),
                tuple(supports), domain, True, (), in_closure)


def _orient(domain, v):
    """Flip v onto the chart sheet when eta(v) != 0."""
    eta = domain._eta_exact if np.asarray(v).dtype == object else domain._eta_float
    return -v if np.dot(eta, v) < 0 else v


def _validate_sampled(domain, vertices, samples):
    d = domain.dim
    reps = [linalg.to_float(_raw(v)) for v in vertices]
    if linalg.rank(np.array(reps)) < d:
        raise NotGeneralPosition("vertices are not in general position")
    reps = [domain.representative(r) for r in reps]
    for r in reps:
        if r is None or not domain.in_closure(r, 1e-9) or domain.contains(r, 1e-9):
            raise VertexNotOnBoundary("vertex is not on the boundary")
    mat = np.array(reps).T
    n = _grid_level(d, samples)
    for parts in _grid(d, n):
        if 0 in parts:
            continue
        p = mat.dot(np.array(parts, dtype=float)) / n
        if not domain.contains(p):
            raise InteriorEscapes("hull interior point outside the domain", witness=ProjPoint(p))
    for i in range(d):
        face = [reps[j] for j in range(d) if j != i]
        center = np.mean(face, axis=0)
        if domain.contains(center, 1e-9):
            raise FaceNotInBoundary("a (d-2)-face of the simplex enters the domain",
                                    witness=ProjPoint(center))


def pseudo_dual(domain: ConvexDomain, flat) -> ProjPoint:
    """The common point of the supporting hyperplanes of the flat's (d-2)-faces."""
    if isinstance(domain, Ellipsoid):
        raise UnsupportedDomain("flats in ellipsoids do not exist for d >= 3; not supported")
    if not isinstance(flat, Flat):
        flat = validate_flat(domain, flat)
    return flat.pseudo_dual.normalized()


def normal_line(flat: Flat, x) -> tuple:
    """The line spanned by F^ and a point x of the closed flat, as two points."""
    xv = _raw(x)
    if not _on_carrier(flat, xv):
        raise NotInDomain("point is not on the flat's carrier")
    if not flat.domain.in_closure(xv):
        raise NotInDomain("point is not in the closed flat")
    return flat.pseudo_dual, ProjPoint(xv)


def _on_carrier(flat, v):
    c = flat.carrier.coords
    if v.dtype == object and c.dtype == object:
        return np.dot(c, v) == 0
    vf = linalg.to_float(v)
    cf = linalg.to_float(c)
    return abs(np.dot(cf, vf)) <= linalg.default_tol() * np.linalg.norm(cf) * np.linalg.norm(vf)


def normal_project(flat: Flat, y) -> ProjPoint:
    """pi_F(y): the point of F on the line through y and F^."""
    domain = flat.domain
    yv = _raw(y)
    if not domain.contains(yv):
        raise NotInDomain("point is not in the open domain")
    c = flat.carrier.coords
    h = flat.pseudo_dual.coords
    if not (yv.dtype == object and c.dtype == object):
        yv, c, h = linalg.to_float(yv), linalg.to_float(c), linalg.to_float(h)
    p = np.dot(c, h) * yv - np.dot(c, yv) * h
    rep = domain.representative(p, exact=p.dtype == object)
    if rep is None or not domain.contains(rep):
        raise ProjectionUndefined("line through y and the pseudo-dual misses the flat")
    return ProjPoint(rep)


def distance_to_flat(domain: ConvexDomain, x, flat: Flat, starts: int = 4) -> float:
    """inf over the flat of d(x, .), by local search in barycentric log-weights."""
    from scipy.optimize import minimize

    mat = linalg.to_float(flat.vertex_matrix())
    k = mat.shape[1]

    def f(s):
        w = np.exp(s - s.max())
        return hilbert_distance(domain, x, mat.dot(w / w.sum()))

    best = math.inf
    inits = [np.zeros(k)] + [np.eye(k)[i] * 2.0 for i in range(min(starts - 1, k))]
    for s0 in inits:
        res = minimize(f, s0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


# ---------------------------------------------------------------------------
# simplex log-coordinates


def _positive(x):
    a = linalg.to_float(np.asarray(x))
    if a.ndim != 1 or np.any(~(a > 0)):
        raise NonPositiveCoordinate("simplex coordinates must be positive")
    return a


def phi_map(x) -> np.ndarray:
    """Log coordinates of a point of the open simplex; the result sums to 0.

    The input is first rescaled so that its entries multiply to 1.
    """
    a = np.log(_positive(x))
    return a - a.mean()


def phi_inverse(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.exp(u - u.mean())


def simplex_distance(x, y) -> float:
    """½(max_i log(x_i/y_i) - min_i log(x_i/y_i))."""
    r = np.log(_positive(x)) - np.log(_positive(y))
    return 0.5 * float(r.max() - r.min())


# ---------------------------------------------------------------------------
# duality


def flat_dual(domain: ConvexDomain, flat: Flat) -> Flat:
    """The flat of the dual domain spanned by the supports of F's (d-2)-faces.

    The dual's carrier is F^ and its pseudo-dual is the carrier of F, so
    applying this twice returns F's vertices and carrier exactly.  The
    result is validated in the dual domain; if validation fails (as it does
    for reducible domains such as the simplex, where the supports span a
    face of the dual) the flat is returned with ``valid=False`` and the
    reason in ``issues``.
    """
    if isinstance(domain, Ellipsoid):
        raise UnsupportedDomain("flat duality is implemented for polytopes")
    dual = domain.polar
    d = domain.dim
    exact = flat.exact
    hat = flat.pseudo_dual.coords
    reps = [v.coords for v in flat.vertices]
    duals = []
    for i in range(d):
        rows = [hat] + [reps[j] for j in range(d) if j != i]
        phi = _nullvector(rows, exact, "support")
        if phi is None:
            raise NonUniqueSupport("frame is degenerate")
        if np.dot(phi, reps[i]) < 0:
            phi = -phi
        duals.append(phi)
    try:
        checked = validate_flat(dual, duals)
        issues = ()
    except (InteriorEscapes, FaceNotInBoundary, NonUniqueSupport, NoCommonPoint,
            VertexNotOnBoundary, NotGeneralPosition) as exc:
        checked = None
        issues = (f"{type(exc).__name__}: {exc}",)
    verts = tuple(ProjPoint(dual.representative(p, exact=exact)) for p in duals)
    carrier = Hyperplane(hat)
    new_hat = ProjPoint(_orient(dual, flat.carrier.coords))
    supports = tuple(Hyperplane(v.coords) for v in flat.vertices)
    if checked is not None:
        return checked
    return Flat(verts, carrier, new_hat, supports, dual, False, issues, dual.in_closure(new_hat.coords))


# ---------------------------------------------------------------------------
# standard neighborhoods


class StandardNeighborhood:
    """Interior of the hull of a flat F and one H_F-orbit.

    Frame coordinates (u_1..u_d, t) of a point y solve
    ``y = sum u_i w_i + t F^``.  H_F acts by ``u_i -> lambda_i u_i`` with
    prod lambda_i = 1, so ``prod(u) / t^d`` is constant on orbits, and the
    region is ``{t > 0, prod(u)/t^d > level} ∩ domain``.
    """

    def __init__(self, flat: Flat, x):
        domain = flat.domain
        xv = _raw(x)
        exact = flat.exact and xv.dtype == object
        if not domain.contains(xv):
            raise NotInDomain("generating point must lie in the domain")
        cols = [v.coords for v in flat.vertices] + [flat.pseudo_dual.coords]
        frame = np.array(cols, dtype=object).T if exact else linalg.to_float(np.array(cols, dtype=object).T)
        if linalg.rank(frame) < frame.shape[0]:
            raise FrameDegenerate("vertices and pseudo-dual do not form a basis")
        self.flat = flat
        self.exact = exact
        self.frame = frame
        self._inverse = linalg.inverse(frame)
        u, t = self._split(xv)
        if t == 0:
            raise PointOnCarrier("generating point lies on the flat's carrier")
        if t < 0:
            # use -F^ so that x sits at t > 0
            self.frame = frame.copy()
            self.frame[:, -1] = -self.frame[:, -1]
            self._inverse = linalg.inverse(self.frame)
            u, t = self._split(xv)
        self.point = ProjPoint(xv)
        self.level = self._invariant(u, t)

    @property
    def dim(self) -> int:
        return self.flat.domain.dim

    def _split(self, y):
        y = self._sheet(y)
        inv = self._inverse if y.dtype == object else linalg.to_float(self._inverse)
        c = inv.dot(y)
        return c[:-1], c[-1]

    def _sheet(self, y):
        rep = self.flat.domain.representative(y, exact=self.exact)
        if rep is None:
            raise PointOnCarrier("point is at infinity")
        return rep if self.exact else linalg.to_float(rep)

    def _invariant(self, u, t):
        prod = u[0]
        for x in u[1:]:
            prod = prod * x
        return prod / t ** len(u)

    def coordinates(self, y):
        """Frame coordinates (u, t) of y's chart representative."""
        return self._split(_raw(y))

    def invariant(self, y):
        u, t = self.coordinates(y)
        if t == 0:
            raise PointOnCarrier("point lies on the flat's carrier")
        return self._invariant(u, t)

    def contains(self, y) -> bool:
        domain = self.flat.domain
        yv = _raw(y)
        if not domain.contains(yv):
            return False
        u, t = self.coordinates(yv)
        if t <= 0 or any(x <= 0 for x in u):
            return False
        return self._invariant(u, t) > self.level

    __call__ = contains

    def h_element(self, lams) -> ProjMap:
        """The element of H_F scaling u_i by lams[i]; prod(lams) must be 1."""
        lams = list(lams)
        if len(lams) != self.dim:
            raise ValueError("need one eigenvalue per flat vertex")
        exact = self.exact and all(isinstance(x, (int, Fraction)) for x in lams)
        prod = 1
        for x in lams:
            prod = prod * x
        if (prod != 1) if exact else abs(prod - 1) > 1e-12:
            raise ValueError("H_F elements have unit determinant on the flat")
        diag = ProjMap.diagonal(lams + [1], exact=exact).matrix
        frame, inv = self.frame, self._inverse
        if not exact:
            frame, inv, diag = linalg.to_float(frame), linalg.to_float(inv), linalg.to_float(diag)
        return ProjMap(frame.dot(diag).dot(inv), exact=exact)

    def hull_decomposition(self, y):
        """Write a region point as (orbit point, flat point) with y = o + f."""
        u, t = self.coordinates(_raw(y))
        prod = float(self._invariant(linalg.to_float(u), float(t)))
        scale = (float(self.level) / prod) ** (1.0 / len(u))
        uf = linalg.to_float(u)
        frame = linalg.to_float(self.frame)
        o = frame.dot(np.append(uf * scale, float(t)))
        f = frame.dot(np.append(uf * (1 - scale), 0.0))
        return o, f


def standard_neighborhood(domain: ConvexDomain, flat: Flat, x) -> StandardNeighborhood:
    if flat.domain is not domain:
        flat = Flat(flat.vertices, flat.carrier, flat.pseudo_dual, flat.supports, domain,
                    flat.valid, flat.issues, flat.pseudo_dual_in_closure)
    return StandardNeighborhood(flat, x)


# ---------------------------------------------------------------------------
# searches and sampled checks


def corner_flats(polytope: Polytope, s=Fraction(1, 2)) -> list:
    """Flats cutting off simple vertices at edge parameter s.

    At each vertex lying on exactly d facets the d edges are followed to
    parameter s and the resulting points are validated as a flat.  Flats
    through such points have every (d-2)-face inside a facet by
    construction; invalid candidates are skipped.
    """
    from .faces import face_lattice

    lattice = face_lattice(polytope)
    edges = lattice.of_dim(1)
    verts = polytope.vertex_array
    s = linalg.to_fraction(s)
    found = []
    for i, v in enumerate(verts):
        k = face_of_point(polytope, v)
        if len(k.facet_ids) != polytope.dim:
            continue
        nbrs = [next(iter(e.vertex_ids - {i})) for e in edges if i in e.vertex_ids]
        if len(nbrs) != polytope.dim:
            continue
        pts = [(1 - s) * v + s * verts[j] for j in nbrs]
        try:
            found.append(validate_flat(polytope, pts))
        except (InteriorEscapes, FaceNotInBoundary, NonUniqueSupport, NoCommonPoint,
                VertexNotOnBoundary, NotGeneralPosition):
            continue
    return found


def epsilon_projection_check(domain, flat: Flat, other: Flat, samples: int = 200,
                             seed: int = 0, eps: float = 1.0) -> dict:
    """Monte-Carlo estimate for the close-flats lemma.

    Samples points x of ``flat``; among those with d(x, other) < eps it
    records how often the normal line at x meets ``other``.  The fraction
    is ``None`` (and ``vacuous`` True) when no sample is that close.
    """
    from .rng import make_rng

    rng = make_rng(seed, 1)
    k = len(flat.vertices)
    mat = linalg.to_float(flat.vertex_matrix())
    h = linalg.to_float(flat.pseudo_dual.coords)
    c2 = linalg.to_float(other.carrier.coords)
    close = hits = 0
    nearest = math.inf
    for _ in range(samples):
        w = rng.dirichlet(np.ones(k))
        x = mat.dot(w)
        dist = distance_to_flat(domain, x, other, starts=1)
        nearest = min(nearest, dist)
        if dist >= eps:
            continue
        close += 1
        p = np.dot(c2, h) * x - np.dot(c2, x) * h
        if np.any(p) and domain.contains(p):
            hits += 1
    return {
        "seed": seed,
        "samples": samples,
        "eps": eps,
        "close": close,
        "hits": hits,
        "fraction": hits / close if close else None,
        "vacuous": close == 0,
        "min_distance": nearest,
    }


def polyhedral_ratio_bounds(d: int) -> tuple:
    """Sharp bounds of ½(max w - min w) / |w|_2 over nonzero sum-zero w in R^(d+1).

    On the simplex the Hilbert distance is ½(max - min) of the log-ratio
    vector while |phi(x) - phi(y)| is the Euclidean norm of its centered
    version, so these bound d_Hilbert / |phi(x) - phi(y)|.  The maximum
    1/sqrt(2) is attained at w = e_i - e_j, the minimum with the entries
    split into two equal-as-possible groups at the two extremes.
    """
    n = d + 1
    lo = 0.5 * math.sqrt(n / ((n // 2) * ((n + 1) // 2)))
    return lo, 0.5 * math.sqrt(2.0)
