"""Small linear-algebra kernel that works over exact rationals or floats.

Arrays holding :class:`fractions.Fraction` entries use ``dtype=object`` and
are handled by fraction-exact Gaussian elimination; float arrays go through
numpy/LAPACK with an explicit relative tolerance.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

_FALLBACK_TOL = 1e-9


def default_tol() -> float:
    """Float comparison tolerance; ``HILBERT_GEOM_TOL`` overrides 1e-9."""
    raw = os.environ.get("HILBERT_GEOM_TOL")
    if raw is None:
        return _FALLBACK_TOL
    return float(raw)


def resolve_tol(tol):
    return default_tol() if tol is None else float(tol)


def is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    # binary64 values convert exactly
    return Fraction(float(x))


def to_exact(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_fraction(x)
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(np.asarray(a, dtype=object).astype(float) if is_exact(a) else a, dtype=float)


def rref(m):
    """Reduced row echelon form over the rationals; returns (matrix, pivots)."""
    a = to_exact(m).copy()
    if a.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, tol=None) -> int:
    a = np.asarray(m)
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(rref(a)[1])
    s = np.linalg.svd(np.atleast_2d(a.astype(float)), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > resolve_tol(tol) * s[0]))


def nullspace(m, tol=None) -> list:
    """Basis of the right null space, as a list of 1-d arrays."""
    a = np.atleast_2d(np.asarray(m))
    cols = a.shape[1]
    if is_exact(a):
        r, pivots = rref(a)
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for f in free:
            v = np.array([Fraction(0)] * cols, dtype=object)
            v[f] = Fraction(1)
            for row, p in enumerate(pivots):
                v[p] = -r[row, f]
            basis.append(v)
        return basis
    a = a.astype(float)
    _, s, vt = np.linalg.svd(a)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    k = int(np.sum(s > resolve_tol(tol) * scale))
    return [vt[i] for i in range(k, cols)]


def solve(a, b):
    """Solve ``a @ x = b`` for square nonsingular ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if is_exact(a) or is_exact(b):
        a = to_exact(a)
        n = a.shape[0]
        bb = to_exact(b).reshape(n, -1)
        aug = np.concatenate([a, bb], axis=1)
        r, pivots = rref(aug)
        if pivots[:n] != list(range(n)) or len(pivots) > n:
            raise np.linalg.LinAlgError("singular matrix")
        x = r[:, n:]
        return x.reshape(b.shape)
    return np.linalg.solve(a.astype(float), b.astype(float))


def inverse(a):
    a = np.asarray(a)
    if is_exact(a):
        n = a.shape[0]
        eye = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
        return solve(a, eye)
    return np.linalg.inv(a.astype(float))


def det(a):
    a = np.asarray(a)
    if not is_exact(a):
        return float(np.linalg.det(a.astype(float)))
    m = to_exact(a).copy()
    n = m.shape[0]
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i, c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[[c, pivot]] = m[[pivot, c]]
            result = -result
        result *= m[c, c]
        for i in range(c + 1, n):
            if m[i, c] != 0:
                m[i] = m[i] - (m[i, c] / m[c, c]) * m[c]
    return result


def int_det(rows) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def integer_row(v) -> list:
    """Positive multiple of a rational vector with coprime integer entries."""
    fr = [to_fraction(x) for x in v]
    lcm = 1
    for x in fr:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def generalized_cross(rows) -> list:
    """Integer normal vector of d integer vectors in Z^(d+1) via signed minors."""
    n = len(rows) + 1
    out = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        out.append((-1) ** j * int_det(minor))
    return out
