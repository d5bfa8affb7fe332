"""Properly convex domains and their Hilbert geometry.

Two kinds of domain are supported:

* :class:`Polytope` - the projectivization of a pointed polyhedral cone,
  given by generators (vertices).  Its facets are recovered exactly, so all
  combinatorics run in rational arithmetic.
* :class:`Ellipsoid` - ``{[v] : v^T Q v < 0}`` for a symmetric form ``Q``
  of signature ``(d, 1)``.

Every domain carries a chart covector ``eta`` that is strictly positive on
the closed cone; representatives are always taken on the sheet ``eta > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from . import linalg
from .errors import (
    CoincidentPoints,
    NotInDomain,
    NotProperlyConvex,
    ZeroVector,
)
from .projective import AffineChart, Hyperplane, ProjMap, ProjPoint, as_point


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    dim: int
    chart: Hyperplane
    interior_point: ProjPoint


@dataclass(frozen=True)
class BoundaryPair:
    """Endpoints of the chord through x and y, with affine parameters.

    Along ``x + t (y - x)`` (representatives in the domain's chart) the
    points sit at ``t_z1 < 0 = t_x < 1 = t_y < t_z2``.
    """

    z1: ProjPoint
    z2: ProjPoint
    t_z1: object
    t_z2: object
    t_x: int = 0
    t_y: int = 1


def _raw(p):
    if isinstance(p, ProjPoint) or isinstance(p, Hyperplane):
        return p.coords
    arr = np.asarray(p)
    if arr.dtype.kind in "iuUS":
        return linalg.to_exact(arr)
    return arr


class ConvexDomain:
    """Common interface; subclasses supply the geometry of a single line."""

    dim: int
    kind: str

    def validate(self) -> ValidationReport:
        return self._report

    @property
    def chart(self) -> AffineChart:
        return AffineChart(self._report.chart)

    @property
    def interior_point(self) -> ProjPoint:
        return self._report.interior_point

    def representative(self, p, exact=False):
        """Representative of [p] normalized so that eta(v) = 1.

        Returns ``None`` when eta(p) = 0, i.e. p is outside every
        neighbourhood of the closure.
        """
        v = _raw(p)
        if exact and v.dtype == object:
            eta = self._eta_exact
        else:
            v = linalg.to_float(v)
            eta = self._eta_float
        val = np.dot(eta, v)
        if val == 0:
            return None
        return v / val

    def line_interval(self, base, direction):
        """Open parameter interval {t : base + t*direction in the domain}."""
        raise NotImplementedError

    def contains(self, p, tol=None) -> bool:
        raise NotImplementedError

    def transform(self, g: ProjMap) -> "ConvexDomain":
        raise NotImplementedError

    def dual(self) -> "ConvexDomain":
        raise NotImplementedError


# ---------------------------------------------------------------------------
# polytopes


def cone_facets(generators) -> list:
    """Facet covectors of the cone spanned by integer generator vectors.

    Every d-subset of generators spanning a hyperplane is a candidate; a
    float pass screens candidates, survivors are confirmed with integer
    minors, so the returned list is exact.  Covectors are primitive integer
    vectors oriented to be >= 0 on all generators, in discovery order.
    """
    gens = [list(map(int, g)) for g in generators]
    n = len(gens)
    if n == 0:
        return []
    width = len(gens[0])
    d = width - 1
    if n < d:
        return []
    gf = np.array(gens, dtype=float)
    gf /= np.linalg.norm(gf, axis=1, keepdims=True)
    found = {}
    all_combos = combinations(range(n), d)
    while True:
        chunk = [c for _, c in zip(range(20000), all_combos)]
        if not chunk:
            break
        idx = np.array(chunk, dtype=int)
        sub = gf[idx]
        normals = np.empty((len(chunk), width))
        for j in range(width):
            minor = np.delete(sub, j, axis=2)
            normals[:, j] = (-1) ** j * (np.linalg.det(minor) if d > 0 else 1.0)
        norms = np.linalg.norm(normals, axis=1)
        ok = norms > 1e-12
        unit = np.zeros_like(normals)
        unit[ok] = normals[ok] / norms[ok, None]
        vals = unit @ gf.T
        pos = np.all(vals >= -1e-9, axis=1)
        neg = np.all(vals <= 1e-9, axis=1)
        for k in np.nonzero(ok & (pos | neg))[0]:
            normal = linalg.generalized_cross([gens[i] for i in chunk[k]])
            if not any(normal):
                continue
            s = [sum(a * b for a, b in zip(normal, g)) for g in gens]
            if all(x >= 0 for x in s):
                pass
            elif all(x <= 0 for x in s):
                normal = [-a for a in normal]
            else:
                continue
            key = tuple(linalg.integer_row(normal))
            found.setdefault(key, None)
    return [list(k) for k in found]


def _kernel_line(cov):
    """A projective line inside {f >= 0 for all f} when the f share a kernel."""
    from scipy.optimize import linprog

    kernel = linalg.nullspace(cov)
    if len(kernel) >= 2:
        return ProjPoint(kernel[0]), ProjPoint(kernel[1])
    k = linalg.to_float(kernel[0])
    f = linalg.to_float(cov)
    width = f.shape[1]
    res = linprog(np.zeros(width), A_ub=-f, b_ub=np.zeros(len(f)),
                  A_eq=np.vstack([k, f.sum(axis=0)]), b_eq=[0.0, 1.0],
                  bounds=[(None, None)] * width, method="highs")
    if not res.success:
        return None
    return ProjPoint(kernel[0]), ProjPoint(res.x)


class Polytope(ConvexDomain):
    """Projectivized polyhedral cone given by generator representatives.

    ``vertices`` are homogeneous coordinate vectors of length ``d+1``; their
    signs matter (they must lie in one cone sheet).  Non-extreme and
    duplicate generators are dropped.  An explicit ``chart`` covector may be
    supplied; otherwise the sum of the primitive facet covectors is used.
    """

    kind = "polytope"

    def __init__(self, vertices, chart=None):
        rows = [linalg.to_exact(_raw(v)) for v in vertices]
        if not rows:
            raise NotProperlyConvex("a polytope needs vertices")
        width = rows[0].size
        if any(r.size != width for r in rows):
            raise ValueError("vertices must share one dimension")
        self.dim = width - 1
        self._generators = np.array(rows, dtype=object)
        self._int_gens = [linalg.integer_row(r) for r in rows]
        self._facets_int = cone_facets(self._int_gens)
        self._given_chart = None if chart is None else linalg.to_exact(_raw(chart))

    @classmethod
    def from_affine(cls, points):
        """Polytope whose vertices are given in the standard chart x_{d+1} = 1."""
        return cls([list(linalg.to_exact(np.asarray(p, dtype=object))) + [Fraction(1)]
                    for p in points])

    @classmethod
    def from_halfspaces(cls, covectors, dim):
        """Polytope {x : f(x) > 0 for all f}, computed by cone duality."""
        cov = [linalg.to_exact(_raw(f)) for f in covectors]
        if len(cov) == 0:
            e = np.eye(dim + 1, dtype=int)
            raise NotProperlyConvex("no half-spaces: the whole projective space",
                                    witness=(ProjPoint(e[0]), ProjPoint(e[1])))
        if linalg.rank(np.array(cov, dtype=object)) < dim + 1:
            raise NotProperlyConvex("half-spaces leave a line unconstrained",
                                    witness=_kernel_line(np.array(cov, dtype=object)))
        rays = cone_facets([linalg.integer_row(f) for f in cov])
        if not rays:
            raise NotProperlyConvex("half-spaces define a degenerate cone")
        return cls(rays)

    # -- validation and canonical data -----------------------------------

    @cached_property
    def _report(self) -> ValidationReport:
        gens = self._generators
        d1 = self.dim + 1
        if linalg.rank(gens) < d1:
            raise NotProperlyConvex("vertices span a proper subspace; the domain has empty interior")
        if self._given_chart is not None:
            eta = self._given_chart
        elif self._facets_int:
            eta = linalg.to_exact(np.sum(np.array(self._facets_int, dtype=object), axis=0))
        else:
            eta = None
        if eta is None or not all(np.dot(eta, g) > 0 for g in gens):
            raise NotProperlyConvex("generators do not lie in a pointed cone",
                                    witness=self._line_witness())
        eta = eta / max(abs(x) for x in eta)
        reps = [g / np.dot(eta, g) for g in gens]
        centroid = np.sum(np.array(reps, dtype=object), axis=0) / len(reps)
        return ValidationReport("polytope", self.dim, Hyperplane(eta), ProjPoint(centroid))

    def _line_witness(self):
        from scipy.optimize import linprog

        g = linalg.to_float(self._generators)
        n = g.shape[0]
        a_eq = np.vstack([g.T, np.ones((1, n))])
        b_eq = np.concatenate([np.zeros(g.shape[1]), [1.0]])
        res = linprog(np.zeros(n), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
        if not res.success:
            return None
        i = int(np.argmax(res.x))
        for k in range(n):
            if k != i and linalg.rank(np.array([self._generators[i], self._generators[k]])) == 2:
                return ProjPoint(self._generators[i]), ProjPoint(self._generators[k])
        return None

    @cached_property
    def _canonical(self):
        rep = self._report
        eta = rep.chart.coords
        gens = [g / np.dot(eta, g) for g in self._generators]
        facets = [linalg.to_exact(np.array(f, dtype=object)) for f in self._facets_int]
        # keep extreme, non-duplicate generators, in input order
        keep, seen = [], set()
        for g in gens:
            tight = [f for f in facets if np.dot(f, g) == 0]
            if not tight or linalg.rank(np.array(tight, dtype=object)) < self.dim:
                continue
            key = tuple(g)
            if key in seen:
                continue
            seen.add(key)
            keep.append(g)
        centroid = np.sum(np.array(keep, dtype=object), axis=0) / len(keep)
        facets = [f / np.dot(f, centroid) for f in facets]
        verts = np.array(keep, dtype=object)
        facs = np.array(facets, dtype=object)
        incidence = np.array([[np.dot(f, v) == 0 for v in verts] for f in facs], dtype=bool)
        return verts, facs, incidence, centroid

    @property
    def vertex_array(self) -> np.ndarray:
        return self._canonical[0]

    @property
    def facet_array(self) -> np.ndarray:
        return self._canonical[1]

    @property
    def incidence(self) -> np.ndarray:
        """Boolean matrix, ``incidence[i, j]`` iff vertex j lies on facet i."""
        return self._canonical[2]

    @property
    def vertices(self) -> list:
        return [ProjPoint(v) for v in self.vertex_array]

    @property
    def facets(self) -> list:
        return [Hyperplane(f) for f in self.facet_array]

    @property
    def is_simplex(self) -> bool:
        return len(self.vertex_array) == self.dim + 1

    @cached_property
    def _eta_exact(self):
        return self._report.chart.coords

    @cached_property
    def _eta_float(self):
        return linalg.to_float(self._report.chart.coords)

    @cached_property
    def _facets_float(self):
        return linalg.to_float(self.facet_array)

    # -- geometry --------------------------------------------------------

    def facet_values(self, p) -> np.ndarray:
        v = self.representative(p, exact=True)
        if v is None:
            return None
        f = self.facet_array if v.dtype == object else self._facets_float
        return f.dot(v)

    def contains(self, p, tol=None) -> bool:
        s = self.facet_values(p)
        if s is None:
            return False
        if s.dtype == object:
            return all(x > 0 for x in s)
        return bool(np.all(s > linalg.resolve_tol(tol)))

    def in_closure(self, p, tol=None) -> bool:
        s = self.facet_values(p)
        if s is None:
            return False
        if s.dtype == object:
            return all(x >= 0 for x in s)
        return bool(np.all(s >= -linalg.resolve_tol(tol)))

    def line_interval(self, base, direction):
        exact = np.asarray(base).dtype == object and np.asarray(direction).dtype == object
        f = self.facet_array if exact else self._facets_float
        if not exact:
            base, direction = linalg.to_float(base), linalg.to_float(direction)
        a = f.dot(base)
        b = f.dot(direction)
        lo = None
        hi = None
        for ai, bi in zip(a, b):
            if bi > 0:
                t = -ai / bi
                lo = t if lo is None or t > lo else lo
            elif bi < 0:
                t = -ai / bi
                hi = t if hi is None or t < hi else hi
        if lo is None:
            lo = -math.inf
        if hi is None:
            hi = math.inf
        return lo, hi

    def transform(self, g: ProjMap) -> "Polytope":
        m = g.matrix if g.exact else linalg.to_exact(g.matrix)
        return Polytope([m.dot(v) for v in self.vertex_array])

    def dual(self) -> "Polytope":
        """Polar dual: facet covectors become vertices.

        Dual vertices keep the scaling f(c) = 1 at this polytope's centroid
        c, which also serves as the dual chart.  The dual's own facets are
        recomputed from scratch.
        """
        return Polytope(list(self.facet_array), chart=self._canonical[3])

    @cached_property
    def polar(self) -> "Polytope":
        """Cached :meth:`dual`."""
        return self.dual()


# ---------------------------------------------------------------------------
# ellipsoids


class Ellipsoid(ConvexDomain):
    """Interior of a quadric: ``{[v] : v^T Q v < 0}`` with Q of signature (d, 1)."""

    kind = "ellipsoid"

    def __init__(self, form):
        q = np.asarray(form)
        exact = q.dtype == object or q.dtype.kind in "iuUS"
        q = linalg.to_exact(q) if exact else np.asarray(q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("form must be square")
        self.form = q
        self.dim = q.shape[0] - 1

    @classmethod
    def unit_ball(cls, d):
        q = np.eye(d + 1, dtype=int)
        q[d, d] = -1
        return cls(q)

    @property
    def exact(self) -> bool:
        return self.form.dtype == object

    @cached_property
    def _form_float(self):
        return linalg.to_float(self.form)

    @cached_property
    def _report(self) -> ValidationReport:
        qf = self._form_float
        if not np.allclose(qf, qf.T, atol=1e-12 * max(1.0, np.abs(qf).max())):
            raise NotProperlyConvex("form is not symmetric")
        if self.exact and not all(self.form[i, j] == self.form[j, i]
                                  for i in range(self.dim + 1) for j in range(i)):
            raise NotProperlyConvex("form is not symmetric")
        w, vecs = np.linalg.eigh(qf)
        scale = np.abs(w).max()
        neg = int(np.sum(w < -1e-12 * scale))
        pos = int(np.sum(w > 1e-12 * scale))
        if neg != 1 or pos != self.dim:
            e = np.eye(self.dim + 1, dtype=int)
            raise NotProperlyConvex(
                f"form has signature ({pos}, {neg}); need ({self.dim}, 1)",
                witness=(ProjPoint(e[0]), ProjPoint(e[1])))
        c = vecs[:, int(np.argmin(w))]
        if self.exact:
            cx = linalg.to_exact([Fraction(x).limit_denominator(10**6) for x in c])
            if cx.dot(self.form).dot(cx) < 0:
                c = cx
        eta = -(self.form.dot(c) if np.asarray(c).dtype == object else qf.dot(c))
        if np.dot(eta, c) < 0:
            eta, c = -eta, -c
        eta = eta / max(abs(x) for x in eta)
        return ValidationReport("ellipsoid", self.dim, Hyperplane(eta), ProjPoint(c))

    @cached_property
    def _eta_exact(self):
        return self._report.chart.coords

    @cached_property
    def _eta_float(self):
        return linalg.to_float(self._report.chart.coords)

    def quadratic(self, p):
        v = _raw(p)
        if v.dtype == object and self.exact:
            return v.dot(self.form).dot(v)
        v = linalg.to_float(v)
        return float(v @ self._form_float @ v)

    def contains(self, p, tol=None) -> bool:
        self._report
        v = _raw(p)
        val = self.quadratic(v)
        if isinstance(val, Fraction):
            return val < 0
        vf = linalg.to_float(v)
        scale = float(vf @ vf) * np.abs(self._form_float).max()
        return val < -linalg.resolve_tol(tol) * scale

    def in_closure(self, p, tol=None) -> bool:
        v = _raw(p)
        val = self.quadratic(v)
        if isinstance(val, Fraction):
            return val <= 0
        vf = linalg.to_float(v)
        scale = float(vf @ vf) * np.abs(self._form_float).max()
        return val <= linalg.resolve_tol(tol) * scale

    def line_interval(self, base, direction):
        q = self._form_float
        p = linalg.to_float(base)
        w = linalg.to_float(direction)
        a = w @ q @ w
        b = 2.0 * (p @ q @ w)
        c = p @ q @ p
        if c >= 0:
            return 0.0, 0.0
        if a == 0:
            t = -c / b
            return (t, math.inf) if b < 0 else (-math.inf, t)
        disc = math.sqrt(max(b * b - 4 * a * c, 0.0))
        qq = -0.5 * (b + math.copysign(disc, b))
        r1, r2 = qq / a, c / qq
        return min(r1, r2), max(r1, r2)

    def transform(self, g: ProjMap) -> "Ellipsoid":
        inv = linalg.inverse(g.matrix)
        q = self.form
        if not (g.exact and self.exact):
            inv, q = linalg.to_float(inv), self._form_float
        return Ellipsoid(inv.T.dot(q).dot(inv))

    def dual(self) -> "Ellipsoid":
        return Ellipsoid(linalg.inverse(self.form))


# ---------------------------------------------------------------------------
# operations


def validate(domain: ConvexDomain) -> ValidationReport:
    return domain.validate()


def contains(domain: ConvexDomain, p, tol=None) -> bool:
    return domain.contains(p, tol)


def _chord(domain, x, y, exact, tol):
    xr = domain.representative(x, exact=exact)
    yr = domain.representative(y, exact=exact)
    if xr is None or yr is None:
        raise NotInDomain("point lies on the chart's hyperplane at infinity")
    if xr.dtype != yr.dtype:
        xr, yr = linalg.to_float(xr), linalg.to_float(yr)
    direction = yr - xr
    if xr.dtype == object:
        coincident = not any(direction)
    else:
        coincident = np.linalg.norm(direction) <= linalg.resolve_tol(tol) * np.linalg.norm(xr)
    if coincident:
        raise CoincidentPoints("x and y are the same projective point")
    lo, hi = domain.line_interval(xr, direction)
    if not (lo < 0 and hi > 1):
        raise NotInDomain("x or y is not in the open domain")
    return xr, direction, lo, hi


def boundary_intersections(domain: ConvexDomain, x, y, tol=None) -> BoundaryPair:
    """Boundary points z1, z2 on the line through x, y, ordered z1, x, y, z2.

    Polytopes solve the one-dimensional linear program over the facet
    inequalities (exactly, for exact input); ellipsoids solve the quadratic.
    """
    exact = isinstance(domain, Polytope)
    xr, direction, lo, hi = _chord(domain, x, y, exact, tol)
    if math.isinf(lo) or math.isinf(hi):
        raise NotProperlyConvex("line does not meet the boundary twice")
    z1 = ProjPoint(xr + lo * direction)
    z2 = ProjPoint(xr + hi * direction)
    return BoundaryPair(z1, z2, lo, hi)


def hilbert_distance(domain: ConvexDomain, x, y, tol=None) -> float:
    """½ log [z1, x, y, z2]."""
    try:
        _, _, lo, hi = _chord(domain, x, y, False, tol)
    except CoincidentPoints:
        if not domain.contains(x, tol):
            raise NotInDomain("point is not in the open domain")
        return 0.0
    # ½ log(((1 - lo)(hi - 0)) / ((0 - lo)(hi - 1))), split for accuracy
    return 0.5 * (math.log1p(-1.0 / lo) + math.log1p(1.0 / (hi - 1.0)))


def finsler_norm(domain: ConvexDomain, x, v, chart: AffineChart | None = None) -> float:
    """Hilbert-Finsler length of tangent vector v (chart coordinates) at x.

    Equals ½(1/t+ + 1/t-) where t+- are the chart distances (in units of v)
    from x to the boundary along +v and -v.
    """
    v = np.asarray(linalg.to_float(np.asarray(v)), dtype=float)
    if not np.any(v):
        raise ZeroVector("tangent vector must be nonzero")
    chart = chart or domain.chart
    base = linalg.to_float(chart.representative(as_point(x)))
    direction = chart.lift_direction(v)
    # same projective curve, moved onto the domain's cone sheet
    if np.dot(domain._eta_float, base) < 0:
        base, direction = -base, -direction
    if not domain.contains(base):
        raise NotInDomain("base point is not in the open domain")
    lo, hi = domain.line_interval(base, direction)
    return 0.5 * (1.0 / hi + 1.0 / (-lo))


def dual_domain(domain: ConvexDomain) -> ConvexDomain:
    domain.validate()
    return domain.dual()


def transform_domain(domain: ConvexDomain, g: ProjMap) -> ConvexDomain:
    return domain.transform(g)
