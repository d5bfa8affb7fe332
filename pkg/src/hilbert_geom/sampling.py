"""Random interior points and random projective maps for property checks."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg
from .domain import ConvexDomain, Polytope
from .projective import ProjMap


def interior_points(domain: ConvexDomain, rng, n: int, margin: float = 0.05) -> np.ndarray:
    """n float points of the domain, kept away from the boundary.

    Polytopes: Dirichlet(1) weights on the vertices, shrunk toward the
    vertex centroid by ``margin``.  Ellipsoids: a random chart direction
    through the center, at a uniform parameter inside the chord shrunk by
    ``margin``.
    """
    if isinstance(domain, Polytope):
        verts = linalg.to_float(domain.vertex_array)
        k = len(verts)
        w = rng.dirichlet(np.ones(k), size=n)
        w = (1 - margin) * w + margin / k
        return w @ verts
    center = linalg.to_float(domain.representative(domain.interior_point.coords))
    chart = domain.chart
    out = np.empty((n, domain.dim + 1))
    for i in range(n):
        v = chart.lift_direction(rng.standard_normal(domain.dim))
        lo, hi = domain.line_interval(center, v)
        t = rng.uniform((1 - margin) * lo, (1 - margin) * hi)
        out[i] = center + t * v
    return out


def rational_interior_points(polytope: Polytope, rng, n: int, denominator: int = 64,
                             margin: int = 1) -> list:
    """Exact interior points: positive integer weights on the vertices."""
    verts = polytope.vertex_array
    out = []
    for _ in range(n):
        w = rng.integers(margin, denominator + 1, size=len(verts))
        total = int(w.sum())
        p = sum((Fraction(int(x), total) * v for x, v in zip(w, verts)), np.zeros(verts.shape[1], dtype=object))
        out.append(p)
    return out


def random_projmap(d: int, rng, max_cond: float = 1e3, scale: int = 4) -> ProjMap:
    """Random invertible rational matrix with condition number below max_cond."""
    while True:
        m = rng.integers(-scale, scale + 1, size=(d + 1, d + 1)) + scale * np.eye(d + 1, dtype=int)
        mf = m.astype(float)
        if abs(np.linalg.det(mf)) < 0.5:
            continue
        if np.linalg.cond(mf) < max_cond:
            return ProjMap(m)
