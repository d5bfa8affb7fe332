"""Homogeneous coordinates for RP^d and its dual.

Points and hyperplanes carry a coordinate array that is either exact
(``dtype=object`` filled with :class:`~fractions.Fraction`) or binary64.
Combinatorial predicates (rank, incidence) should be fed exact data; metric
quantities are evaluated in floats.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg
from .errors import (
    DegenerateConfiguration,
    NotCollinear,
    PointAtInfinity,
    SingularMap,
)


def _coords(values, exact=None) -> np.ndarray:
    if isinstance(values, _Homogeneous):
        values = values.coords
    arr = np.asarray(values)
    if exact is None:
        exact = arr.dtype == object or arr.dtype.kind in "iu" or (
            arr.dtype.kind in "US")
    if exact:
        arr = linalg.to_exact(arr)
    else:
        arr = np.asarray(linalg.to_float(arr), dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("homogeneous coordinates need a vector of length >= 2")
    return arr


class _Homogeneous:
    __slots__ = ("coords",)

    def __init__(self, coords, exact=None):
        c = _coords(coords, exact)
        if not any(x != 0 for x in c):
            raise ValueError("homogeneous coordinates cannot all vanish")
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    @property
    def exact(self) -> bool:
        return self.coords.dtype == object

    def normalized(self):
        """Largest-magnitude coordinate scaled to +-1, first nonzero positive."""
        c = self.coords
        big = max(abs(x) for x in c)
        first = next(x for x in c if x != 0)
        scale = big if first > 0 else -big
        return type(self)(c / scale, exact=self.exact)

    def to_float(self):
        return type(self)(linalg.to_float(self.coords), exact=False)

    def to_exact(self):
        return type(self)(self.coords, exact=True)

    def same_as(self, other, tol=None) -> bool:
        """Projective equality: the two coordinate vectors are proportional."""
        a = self.coords
        b = _coords(other)
        if a.size != b.size:
            return False
        if self.exact and b.dtype == object:
            i = next(k for k in range(a.size) if a[k] != 0)
            if b[i] == 0:
                return False
            return all(a[i] * b[k] == b[i] * a[k] for k in range(a.size))
        af = linalg.to_float(a)
        bf = linalg.to_float(b)
        af = af / np.linalg.norm(af)
        bf = bf / np.linalg.norm(bf)
        return bool(min(np.linalg.norm(af - bf), np.linalg.norm(af + bf)) <= linalg.resolve_tol(tol))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        n = self.normalized().coords
        if self.exact:
            return hash(tuple(n))
        return hash(tuple(np.round(linalg.to_float(n), 9)))

    def __repr__(self):
        body = ":".join(str(x) for x in self.coords)
        return f"{type(self).__name__}[{body}]"


class ProjPoint(_Homogeneous):
    """A point [v] of RP^d."""

    __slots__ = ()


class Hyperplane(_Homogeneous):
    """A point [eta] of the dual projective space, i.e. the hyperplane ker(eta)."""

    __slots__ = ()

    @property
    def covector(self):
        return self.coords

    def __call__(self, p):
        return incidence(p, self)


def as_point(p, exact=None) -> ProjPoint:
    if isinstance(p, ProjPoint):
        return p
    return ProjPoint(p, exact=exact)


def as_hyperplane(h, exact=None) -> Hyperplane:
    if isinstance(h, Hyperplane):
        return h
    return Hyperplane(h, exact=exact)


def incidence(p, h):
    """eta(v); zero exactly when the point lies on the hyperplane."""
    pc = _coords(p)
    hc = _coords(h)
    if pc.dtype != hc.dtype:
        pc, hc = linalg.to_float(pc), linalg.to_float(hc)
    return np.dot(hc, pc)


class ProjMap:
    """An element of PGL(d+1) represented by an invertible matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, exact=None):
        m = np.asarray(matrix)
        if exact is None:
            exact = m.dtype == object or m.dtype.kind in "iu"
        m = linalg.to_exact(m) if exact else np.asarray(linalg.to_float(m), dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("projective maps need a square matrix")
        if exact:
            if linalg.det(m) == 0:
                raise SingularMap("matrix is singular")
        elif linalg.rank(m, tol=1e-13) < m.shape[0]:
            raise SingularMap("matrix is numerically singular")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("ProjMap is immutable")

    @classmethod
    def identity(cls, d, exact=True):
        return cls(np.eye(d + 1, dtype=int), exact=exact)

    @classmethod
    def diagonal(cls, entries, exact=None):
        entries = list(entries)
        n = len(entries)
        m = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                m[i, j] = entries[i] if i == j else 0
        return cls(m, exact=exact)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def inverse(self):
        return ProjMap(linalg.inverse(self.matrix), exact=self.exact)

    def __matmul__(self, other):
        if not isinstance(other, ProjMap):
            return NotImplemented
        a, b = self.matrix, other.matrix
        exact = self.exact and other.exact
        if not exact:
            a, b = linalg.to_float(a), linalg.to_float(b)
        return ProjMap(a.dot(b), exact=exact)

    def same_as(self, other, tol=None) -> bool:
        a = ProjPoint(self.matrix.ravel(), exact=self.exact)
        return a.same_as(ProjPoint(other.matrix.ravel(), exact=other.exact), tol)

    def __eq__(self, other):
        if not isinstance(other, ProjMap):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None

    def __repr__(self):
        return f"ProjMap({self.matrix.tolist()})"


def _mixed(m, v):
    if m.dtype != v.dtype:
        return linalg.to_float(m), linalg.to_float(v)
    return m, v


def apply(g: ProjMap, p) -> ProjPoint:
    """Image of a point: matrix-vector product, projectively normalized."""
    p = as_point(p)
    m, v = _mixed(g.matrix, p.coords)
    return ProjPoint(m.dot(v), exact=m.dtype == object).normalized()


def apply_dual(g: ProjMap, h) -> Hyperplane:
    """Image of a hyperplane: eta -> eta o g^-1 (row vector times inverse)."""
    h = as_hyperplane(h)
    inv = linalg.inverse(g.matrix)
    m, v = _mixed(inv, h.coords)
    return Hyperplane(v.dot(m), exact=m.dtype == object).normalized()


def general_position(points, tol=None) -> bool:
    """True iff the coordinate vectors of the k <= d+1 points are independent."""
    pts = [as_point(p) for p in points]
    if not pts:
        return True
    if len(pts) > pts[0].coords.size:
        return False
    m = _stack(pts)
    return linalg.rank(m, tol) == len(pts)


def _stack(objs) -> np.ndarray:
    rows = [o.coords for o in objs]
    if all(r.dtype == object for r in rows):
        return np.array(rows, dtype=object)
    return np.array([linalg.to_float(r) for r in rows], dtype=float)


def cross_ratio_of_parameters(t1, tx, ty, t2):
    """[z1, x, y, z2] from affine parameters on the line."""
    den = (tx - t1) * (t2 - ty)
    if den == 0:
        raise DegenerateConfiguration("cross-ratio denominator vanishes")
    return (ty - t1) * (t2 - tx) / den


def cross_ratio(z1, x, y, z2, tol=None):
    """Cross-ratio [z1, x, y, z2] = ((y-z1)(z2-x)) / ((x-z1)(z2-y)).

    The four points must be collinear. Exact inputs give an exact
    :class:`Fraction`; otherwise a float is returned.
    """
    pts = [as_point(p) for p in (z1, x, y, z2)]
    m = _stack(pts)
    exact = m.dtype == object
    if linalg.rank(m, tol) > 2:
        raise NotCollinear("cross-ratio needs four collinear points")
    # Coordinates of every point along two columns (i, j) on which the line's
    # span projects isomorphically; 2x2 minors then play the role of
    # parameter differences.
    i, j = _best_pair(m)
    if exact:
        def bracket(a, b):
            return m[a, i] * m[b, j] - m[a, j] * m[b, i]
    else:
        mf = m / np.linalg.norm(m, axis=1, keepdims=True)

        def bracket(a, b):
            return mf[a, i] * mf[b, j] - mf[a, j] * mf[b, i]
    left, right = bracket(1, 0), bracket(3, 2)
    if exact:
        degenerate = left == 0 or right == 0
    else:
        eps = linalg.resolve_tol(tol)
        degenerate = abs(left) <= eps or abs(right) <= eps
    if degenerate:
        raise DegenerateConfiguration("z1 = x or y = z2")
    value = bracket(2, 0) * bracket(3, 1) / (left * right)
    return value if exact else float(value)


def _best_pair(m):
    cols = m.shape[1]
    rows = m.shape[0]
    mf = linalg.to_float(m)
    best, best_val = (0, 1), -1.0
    for i in range(cols):
        for j in range(i + 1, cols):
            val = 0.0
            for a in range(rows):
                for b in range(a + 1, rows):
                    val = max(val, abs(mf[a, i] * mf[b, j] - mf[a, j] * mf[b, i]))
            if val > best_val:
                best, best_val = (i, j), val
    return best


class AffineChart:
    """The chart A_eta = {v : eta(v) = 1}.

    Chart coordinates of [v] are the entries of v / eta(v) with one fixed
    coordinate dropped (the last index where |eta| is largest), which is a
    bijection from A_eta onto R^d.
    """

    __slots__ = ("normalizer", "drop")

    def __init__(self, normalizer):
        h = as_hyperplane(normalizer)
        c = linalg.to_float(h.coords)
        big = np.max(np.abs(c))
        drop = max(k for k in range(c.size) if abs(c[k]) == big)
        object.__setattr__(self, "normalizer", h)
        object.__setattr__(self, "drop", drop)

    def __setattr__(self, name, value):
        raise AttributeError("AffineChart is immutable")

    @property
    def dim(self) -> int:
        return self.normalizer.dim

    def representative(self, p):
        """The representative v of [p] with eta(v) = 1."""
        p = as_point(p)
        val = incidence(p, self.normalizer)
        if val == 0:
            raise PointAtInfinity("point lies on the hyperplane at infinity")
        c = p.coords if p.exact and self.normalizer.exact else linalg.to_float(p.coords)
        return c / val

    def coords(self, p) -> np.ndarray:
        return np.delete(self.representative(p), self.drop)

    def lift(self, u) -> np.ndarray:
        """Inverse of :meth:`coords`: chart coordinates to homogeneous vector."""
        eta = self.normalizer.coords
        u = np.asarray(u)
        exact = u.dtype == object and self.normalizer.exact
        if not exact:
            eta = linalg.to_float(eta)
            u = linalg.to_float(u)
        rest = np.delete(eta, self.drop)
        k = eta[self.drop]
        value = (1 - np.dot(rest, u)) / k
        return np.insert(np.asarray(u, dtype=object if exact else float), self.drop, value)

    def lift_direction(self, v) -> np.ndarray:
        """Homogeneous direction (inside ker eta) of a chart tangent vector."""
        eta = linalg.to_float(self.normalizer.coords)
        v = linalg.to_float(np.asarray(v))
        rest = np.delete(eta, self.drop)
        value = -np.dot(rest, v) / eta[self.drop]
        return np.insert(v, self.drop, value)


def chart_coords(chart: AffineChart, p) -> np.ndarray:
    return chart.coords(p)


__all__ = [
    "AffineChart",
    "Fraction",
    "Hyperplane",
    "ProjMap",
    "ProjPoint",
    "apply",
    "apply_dual",
    "as_hyperplane",
    "as_point",
    "chart_coords",
    "cross_ratio",
    "cross_ratio_of_parameters",
    "general_position",
    "incidence",
]
