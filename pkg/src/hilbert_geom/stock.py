"""Ready-made domains and flats used by the tests, suites and CLI."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .domain import Ellipsoid, Polytope


def simplex(d: int) -> Polytope:
    """Standard simplex: the positive orthant in RP^d, vertices e_1..e_{d+1}."""
    return Polytope(np.eye(d + 1, dtype=int))


def interval() -> Polytope:
    """(-1, 1) in the chart x_2 = 1."""
    return Polytope.from_affine([[-1], [1]])


def cube(d: int = 3) -> Polytope:
    return Polytope.from_affine([list(p) for p in product([-1, 1], repeat=d)])


def square() -> Polytope:
    return cube(2)


def cross_polytope(d: int = 3) -> Polytope:
    pts = []
    for i in range(d):
        for s in (1, -1):
            e = [0] * d
            e[i] = s
            pts.append(e)
    return Polytope.from_affine(pts)


def unit_ball(d: int) -> Ellipsoid:
    return Ellipsoid.unit_ball(d)


def corner_flat_vertices(d: int, vertex: int = 0, s=Fraction(1, 2)) -> list:
    """Points at parameter s along the edges of the simplex at one vertex."""
    s = Fraction(s)
    out = []
    for j in range(d + 1):
        if j == vertex:
            continue
        p = [Fraction(0)] * (d + 1)
        p[vertex] = 1 - s
        p[j] = s
        out.append(p)
    return out


def rational_sphere_point(t) -> list:
    """Inverse stereographic projection of a rational vector t in Q^(d-1)."""
    t = [Fraction(x) for x in t]
    n2 = sum(x * x for x in t)
    return [2 * x / (n2 + 1) for x in t] + [(n2 - 1) / (n2 + 1)]


def random_polytope(d: int, n: int, rng, denominator: int = 7) -> Polytope:
    """Hull of n distinct rational points on the unit sphere S^(d-1).

    Every point is extreme, so the polytope has exactly n vertices.
    """
    pts, seen = [], set()
    while len(pts) < n:
        t = tuple(Fraction(int(k), denominator) for k in rng.integers(-3 * denominator, 3 * denominator + 1, size=d - 1))
        if t in seen:
            continue
        seen.add(t)
        pts.append(rational_sphere_point(t))
    return Polytope.from_affine(pts)


STOCK = {
    "interval": interval,
    "square": square,
    "simplex2": lambda: simplex(2),
    "simplex3": lambda: simplex(3),
    "simplex4": lambda: simplex(4),
    "cube3": lambda: cube(3),
    "cross3": lambda: cross_polytope(3),
    "ball2": lambda: unit_ball(2),
    "ball3": lambda: unit_ball(3),
}
