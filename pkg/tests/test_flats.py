import math
from fractions import Fraction as Fr
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from hilbert_geom import linalg, stock
from hilbert_geom.domain import hilbert_distance
from hilbert_geom.errors import (
    InteriorEscapes,
    NonPositiveCoordinate,
    NotGeneralPosition,
    NotInDomain,
    PointOnCarrier,
    UnsupportedDomain,
    VertexNotOnBoundary,
)
from hilbert_geom.flats import (
    corner_flats,
    distance_to_flat,
    epsilon_projection_check,
    flat_dual,
    normal_line,
    normal_project,
    phi_inverse,
    phi_map,
    polyhedral_ratio_bounds,
    pseudo_dual,
    simplex_distance,
    standard_neighborhood,
    validate_flat,
)
from hilbert_geom.projective import ProjPoint
from hilbert_geom.rng import make_rng
from hilbert_geom.sampling import interior_points, rational_interior_points

half, quarter = Fr(1, 2), Fr(1, 4)


def corner(d=3, s=half):
    dom = stock.simplex(d)
    return dom, validate_flat(dom, stock.corner_flat_vertices(d, 0, s))


def v1(d=3):
    return ProjPoint([1] + [0] * d)


# -- validation and pseudo-duals ------------------------------------------


def test_corner_flat_valid():
    dom, flat = corner()
    assert flat.valid and flat.dim == 2
    assert flat.carrier.same_as([1, -1, -1, -1])


def test_facet_triangle_escapes():
    with pytest.raises(InteriorEscapes):
        validate_flat(stock.simplex(3), [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_barycenter_vertex_rejected():
    with pytest.raises(VertexNotOnBoundary):
        validate_flat(stock.simplex(3), [[1, 1, 1, 1], [0, 1, 1, 0], [0, 1, 0, 1]])


def test_collinear_vertices_rejected():
    with pytest.raises(NotGeneralPosition):
        validate_flat(stock.simplex(3), [[1, 1, 0, 0], [1, 1, 0, 0], [1, 0, 0, 1]])


@pytest.mark.parametrize("s", [half, quarter, Fr(1, 3), Fr(3, 4)])
def test_pseudo_dual_is_corner_vertex(s):
    dom, flat = corner(3, s)
    hat = pseudo_dual(dom, flat)
    assert hat.exact and hat == v1()
    assert hat.coords.tolist() == [1, 0, 0, 0]
    # the corner vertex is in the closed simplex
    assert flat.pseudo_dual_in_closure


def test_pseudo_dual_other_dimensions():
    for d in (2, 4):
        dom, flat = corner(d)
        assert pseudo_dual(dom, flat) == v1(d)


def test_square_flat_has_pseudo_dual_at_infinity():
    sq = stock.square()
    flat = validate_flat(sq, [[0, -1, 1], [0, 1, 1]])
    assert flat.pseudo_dual == ProjPoint([1, 0, 0])
    assert not flat.pseudo_dual_in_closure


def test_flats_need_polytopes():
    ball = stock.unit_ball(2)
    with pytest.raises(UnsupportedDomain):
        validate_flat(ball, [[-1, 0, 1], [1, 0, 1]])
    with pytest.raises(UnsupportedDomain):
        pseudo_dual(ball, [[-1, 0, 1], [1, 0, 1]])


# -- normal lines and projections -------------------------------------------


def test_normal_line_through_barycenter():
    dom, flat = corner()
    a, b = normal_line(flat, flat.barycenter())
    assert a == v1()
    assert b == flat.barycenter()
    # a flat vertex still gives a line
    a, b = normal_line(flat, flat.vertices[0])
    assert b == flat.vertices[0]
    with pytest.raises(NotInDomain):
        normal_line(flat, [1, 1, 1, 1])


def test_projection_fixes_flat_points():
    dom, flat = corner()
    y = flat.point([1, 2, 3])
    assert normal_project(flat, y) == y


def test_projection_along_normal_line():
    dom, flat = corner()
    x = flat.point([1, 1, 2]).coords
    y = x + Fr(1, 5) * np.array([1, 0, 0, 0], dtype=object)
    assert dom.contains(y)
    assert normal_project(flat, y) == ProjPoint(x)


def test_projection_idempotent_exact():
    dom, flat = corner()
    for y in rational_interior_points(dom, make_rng(2, 0), 50):
        p = normal_project(flat, y)
        assert p.exact
        assert normal_project(flat, p) == p
        assert np.dot(flat.carrier.coords, p.coords) == 0


def test_projection_non_expansive():
    dom, flat = corner()
    rng = make_rng(4, 0)
    xs, ys = interior_points(dom, rng, 2000), interior_points(dom, rng, 2000)
    for x, y in zip(xs, ys):
        px, py = normal_project(flat, x), normal_project(flat, y)
        assert hilbert_distance(dom, px.coords, py.coords) <= hilbert_distance(dom, x, y) + 1e-9


def test_distance_to_flat_zero_on_flat():
    dom, flat = corner()
    assert distance_to_flat(dom, flat.barycenter().coords.astype(float), flat) < 1e-6
    x = np.array([1.0, 1, 1, 1])
    assert distance_to_flat(dom, x, flat) > 0.1


# -- simplex log coordinates --------------------------------------------------


def test_phi_examples():
    assert np.allclose(phi_map([1, 1, 1, 1]), 0)
    assert np.allclose(phi_map([2, 6, 4]), phi_map([1, 3, 2]))
    assert np.allclose(phi_map([math.e, 1 / math.e]), [1, -1])
    with pytest.raises(NonPositiveCoordinate):
        phi_map([1, 0, 2])


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=5))
def test_phi_inverse_round_trip(u):
    u = np.array(u) - np.mean(u)
    assert np.allclose(phi_map(phi_inverse(u)), u, atol=1e-9)


def test_simplex_distance_examples():
    assert simplex_distance([1, 2, 3], [1, 2, 3]) == 0.0
    # (1,1) and (3,1/3) in the interval chart x0/x1 in (0, inf)
    assert simplex_distance([1, 1], [3, Fr(1, 3)]) == pytest.approx(math.log(3))
    assert hilbert_distance(stock.simplex(1), [1, 1], [3, 1 / 3]) == pytest.approx(math.log(3))
    dom = stock.simplex(3)
    rng = make_rng(8, 0)
    for x, y in zip(interior_points(dom, rng, 200), interior_points(dom, rng, 200)):
        assert simplex_distance(x, y) == pytest.approx(hilbert_distance(dom, x, y), abs=1e-10)


# -- bi-Lipschitz constants ----------------------------------------------------


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_ratio_bounds_against_sphere_sampling(d):
    # brute force over random and structured sum-zero directions
    n = d + 1
    lo, hi = polyhedral_ratio_bounds(d)
    rng = make_rng(10, d)
    w = rng.standard_normal((20000, n))
    w -= w.mean(axis=1, keepdims=True)
    extra = []
    for signs in product([-1, 0, 1], repeat=n):
        v = np.array(signs, dtype=float)
        v -= v.mean()
        if np.any(v):
            extra.append(v)
    w = np.vstack([w, extra])
    r = 0.5 * (w.max(axis=1) - w.min(axis=1)) / np.linalg.norm(w, axis=1)
    assert r.min() >= lo - 1e-12 and r.max() <= hi + 1e-12
    # both constants are attained by {-1, 0, 1} vectors
    assert r.min() == pytest.approx(lo, abs=1e-12)
    assert r.max() == pytest.approx(hi, abs=1e-12)


def test_ratio_bounds_frozen():
    assert polyhedral_ratio_bounds(2) == pytest.approx((math.sqrt(3 / 8), math.sqrt(2) / 2))
    assert polyhedral_ratio_bounds(3) == pytest.approx((0.5, math.sqrt(2) / 2))


@pytest.mark.parametrize("d", [2, 3])
def test_empirical_hilbert_euclid_ratio(d):
    dom = stock.simplex(d)
    lo, hi = polyhedral_ratio_bounds(d)
    rng = make_rng(11, d)
    xs, ys = interior_points(dom, rng, 2000), interior_points(dom, rng, 2000)
    for x, y in zip(xs, ys):
        r = hilbert_distance(dom, x, y) / np.linalg.norm(phi_map(x) - phi_map(y))
        assert lo - 1e-9 <= r <= hi + 1e-9


# -- flat duality ---------------------------------------------------------------


def test_corner_flat_dual_involution():
    for s in (half, quarter):
        dom, flat = corner(3, s)
        fd = flat_dual(dom, flat)
        # the supports through v1 are the facets x_j = 0, j = 2..4
        assert {tuple(v.normalized().coords) for v in fd.vertices} == {
            (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)}
        assert fd.carrier.same_as([1, 0, 0, 0])
        # in the dual simplex this triangle spans a facet, so it is not a flat there
        assert not fd.valid and "InteriorEscapes" in fd.issues[0]
        back = flat_dual(dom.polar, fd)
        assert back.carrier.same_as(flat.carrier.coords)
        assert {v.normalized() for v in back.vertices} == {v.normalized() for v in flat.vertices}


def test_square_flat_dual_ends_at_polar_vertices():
    sq = stock.square()
    flat = validate_flat(sq, [[0, -1, 1], [0, 1, 1]])
    fd = flat_dual(sq, flat)
    # the dual segment is a diagonal of the diamond; its ends are vertices
    # with a whole pencil of supporting lines
    assert {v.normalized() for v in fd.vertices} == {ProjPoint([0, -1, 1]).normalized(),
                                                     ProjPoint([0, 1, 1]).normalized()}
    assert not fd.valid and "NonUniqueSupport" in fd.issues[0]
    back = flat_dual(sq.polar, fd)
    assert back.carrier.same_as(flat.carrier.coords)
    assert {v.normalized() for v in back.vertices} == {v.normalized() for v in flat.vertices}


# -- standard neighborhoods -------------------------------------------------------


def test_neighborhood_examples():
    dom, flat = corner()
    x = np.array([1, 1, 1, 1], dtype=object)
    sn = standard_neighborhood(dom, flat, x)
    assert not sn.contains(x)
    px = normal_project(flat, x).coords
    for lam in (Fr(1, 4), half, Fr(3, 4)):
        y = (1 - lam) * x / sum(x) + lam * px / sum(px)
        assert sn.contains(y)
    # beyond the carrier, on the side of the far facet
    assert not sn.contains([1, 3, 3, 3])
    with pytest.raises(PointOnCarrier):
        standard_neighborhood(dom, flat, [3, 1, 1, 1])


def test_neighborhood_level_invariant_under_h():
    dom, flat = corner()
    sn = standard_neighborhood(dom, flat, [1, 1, 1, 1])
    for lams in ([2, half, 1], [3, 3, Fr(1, 9)], [Fr(1, 5), 1, 5]):
        g = sn.h_element(lams)
        y = g.matrix.dot(np.array([1, 1, 1, 1], dtype=object))
        assert sn.invariant(y) == sn.level
    with pytest.raises(ValueError):
        sn.h_element([2, 2, 2])


def cone_hull_contains(gens, y):
    """LP feasibility of y as a nonnegative combination of the columns of gens."""
    res = linprog(np.zeros(gens.shape[1]), A_eq=gens, b_eq=y,
                  bounds=[(0, None)] * gens.shape[1], method="highs")
    return res.status == 0


@pytest.mark.parametrize("d", [2, 3])
def test_neighborhood_matches_hull_oracle(d):
    dom, flat = corner(d)
    x = np.array([1.0] * (d + 1))
    sn = standard_neighborhood(dom, flat, x)
    # H_F built independently: diagonal in the basis (flat vertices, corner vertex)
    basis = np.column_stack([linalg.to_float(v.coords) for v in flat.vertices] + [np.eye(d + 1)[0]])
    inv = np.linalg.inv(basis)
    steps = np.arange(-6, 6.01, 0.3 if d == 3 else 0.05)
    orbit = []
    for logs in product(steps, repeat=d - 1):
        lam = np.exp(list(logs) + [-sum(logs)])
        orbit.append(basis @ np.diag(list(lam) + [1.0]) @ inv @ x)
    gens = np.column_stack([basis[:, :d]] + [np.array(orbit).T])
    rng = make_rng(12, d)
    checked = {True: 0, False: 0}
    for y in interior_points(dom, rng, 600, margin=0.0):
        u, t = sn.coordinates(y)
        if t <= 0:
            assert not sn.contains(y)
            continue
        ratio = float(sn.invariant(y) / sn.level)
        spread = np.log(np.asarray(u, dtype=float) / float(t))
        if abs(math.log(ratio)) < 0.05 or np.ptp(spread) > 5:
            continue
        inside = sn.contains(y)
        assert inside == cone_hull_contains(gens, y / y.sum())
        checked[inside] += 1
    assert checked[True] > 20 and checked[False] > 20


def test_hull_decomposition():
    dom, flat = corner()
    sn = standard_neighborhood(dom, flat, [1, 1, 1, 1])
    rng = make_rng(13, 0)
    for y in interior_points(dom, rng, 300):
        if not sn.contains(y):
            continue
        o, f = sn.hull_decomposition(y)
        ys = y / (np.ones(4) @ y)
        assert np.allclose(o + f, ys)
        assert float(sn.invariant(o)) == pytest.approx(float(sn.level), rel=1e-9)
        assert abs(np.dot(linalg.to_float(flat.carrier.coords), f)) < 1e-12


# -- searches, closedness and the segment lemma ---------------------------------


def test_corner_flats_search():
    assert len(corner_flats(stock.simplex(3))) == 4
    cube_flats = corner_flats(stock.cube(3))
    assert len(cube_flats) == 8
    assert all(f.pseudo_dual_in_closure for f in cube_flats)


def test_closedness_of_corner_family():
    dom = stock.simplex(3)
    limit = validate_flat(dom, stock.corner_flat_vertices(3, 0, Fr(2, 3)))
    for k in range(1, 30):
        s = Fr(2, 3) - Fr(1, 3 * (k + 1))
        f = validate_flat(dom, stock.corner_flat_vertices(3, 0, s))
        assert f.pseudo_dual == limit.pseudo_dual
    # the degenerate limit s -> 1 is the opposite facet, not a flat
    with pytest.raises(InteriorEscapes):
        validate_flat(dom, stock.corner_flat_vertices(3, 0, 1))


def test_segment_lemma_fails_on_reducible_simplex():
    # On the simplex, boundary segments may meet the flat's boundary without
    # lying in it, so the segment property is specific to irreducible domains.
    dom, flat = corner()
    car = flat.carrier.coords
    e = np.eye(4, dtype=int).astype(object)
    on_carrier = lambda p: np.dot(car, p) == 0
    # the edge v1 v2 lies in the boundary and passes through the vertex m12 of F
    a, b = e[0], e[1]
    m12 = (a + b) / 2
    assert on_carrier(m12) and dom.in_closure(m12) and not dom.contains(m12)
    assert not on_carrier(a) and not on_carrier(b)
    # a segment inside the facet x4 = 0 crossing the edge of F there
    a, b = e[0], (e[1] + e[2]) / 2
    cross = Fr(1, 2) * a + Fr(1, 2) * b
    assert on_carrier(cross) and all(dom.facet_values(p)[0] >= 0 for p in (a, b))
    assert not on_carrier(a)
    # segments inside the boundary of F do stay on the carrier
    for s in (Fr(0), Fr(1, 3), Fr(1)):
        p = (1 - s) * flat.vertices[0].coords + s * flat.vertices[1].coords
        assert on_carrier(p) and not dom.contains(p)


# -- close flats ---------------------------------------------------------------------


def test_epsilon_check_crossing_and_vacuous():
    dom, flat = corner(3, half)
    near = validate_flat(dom, stock.corner_flat_vertices(3, 0, Fr(1, 2) + Fr(1, 50)))
    rep = epsilon_projection_check(dom, flat, near, samples=40, seed=3, eps=1.0)
    assert rep["fraction"] == 1.0 and not rep["vacuous"]
    far = validate_flat(dom, stock.corner_flat_vertices(3, 3, Fr(1, 100)))
    rep = epsilon_projection_check(dom, flat, far, samples=10, seed=3, eps=0.05)
    assert rep["vacuous"] and rep["fraction"] is None
    again = epsilon_projection_check(dom, flat, far, samples=10, seed=3, eps=0.05)
    assert again == rep
