from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbert_geom import linalg
from hilbert_geom.errors import DegenerateConfiguration, NotCollinear, PointAtInfinity, SingularMap
from hilbert_geom.projective import (
    AffineChart,
    Hyperplane,
    ProjMap,
    ProjPoint,
    apply,
    apply_dual,
    chart_coords,
    cross_ratio,
    cross_ratio_of_parameters,
    general_position,
    incidence,
)

small = st.integers(-6, 6)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=9)


def line_point(t):
    return [t, 1]


def invertible(n=2):
    # a diagonal shift of 13 makes the matrix strictly diagonally dominant
    rows = st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)
    return rows.map(lambda m: ProjMap(np.array(m, dtype=object) + 13 * np.eye(n, dtype=int)))


def test_cross_ratio_hand_example():
    # (1/2 + 1)(1 - 0) / ((0 + 1)(1 - 1/2)) = 3
    pts = [line_point(Fr(t)) for t in (-1, 0, Fr(1, 2), 1)]
    assert cross_ratio(*pts) == 3
    assert cross_ratio_of_parameters(-1, 0, Fr(1, 2), 1) == 3


def test_cross_ratio_coincident_middle():
    assert cross_ratio([Fr(-1), 1], [Fr(1, 3), 1], [Fr(1, 3), 1], [Fr(1), 1]) == 1


def test_cross_ratio_after_map_is_three():
    g = ProjMap([[2, 1], [1, 3]])
    pts = [apply(g, line_point(Fr(t))) for t in (-1, 0, Fr(1, 2), 1)]
    assert cross_ratio(*pts) == 3


def test_cross_ratio_in_plane_and_float():
    a, b = np.array([1, 0, 1]), np.array([0, 1, 1])
    pts = [a + t * (b - a) for t in (Fr(0), Fr(1, 4), Fr(1, 2), Fr(1))]
    exact = cross_ratio(*pts)
    assert exact == cross_ratio_of_parameters(0, Fr(1, 4), Fr(1, 2), 1)
    floats = [np.array(p, dtype=float) for p in pts]
    assert cross_ratio(*floats) == pytest.approx(float(exact), rel=1e-12)


def test_cross_ratio_errors():
    with pytest.raises(NotCollinear):
        cross_ratio([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1])
    with pytest.raises(DegenerateConfiguration):
        cross_ratio([0, 1], [0, 1], [1, 1], [2, 1])


@given(st.lists(rationals, min_size=4, max_size=4, unique=True), invertible())
def test_cross_ratio_projective_invariance(ts, g):
    pts = [line_point(t) for t in ts]
    before = cross_ratio(*pts)
    after = cross_ratio(*[apply(g, p) for p in pts])
    assert before == after


@given(st.lists(rationals, min_size=4, max_size=4, unique=True))
def test_cross_ratio_swap_middle_inverts(ts):
    z1, x, y, z2 = (line_point(t) for t in ts)
    assert cross_ratio(z1, x, y, z2) * cross_ratio(z1, y, x, z2) == 1


@given(st.lists(st.floats(-4, 4), min_size=4, max_size=4))
def test_cross_ratio_float_invariance(ts):
    ts = sorted(ts)
    if min(np.diff(ts)) < 1e-2:
        return
    g = ProjMap(np.array([[1.3, -0.4], [0.2, 0.9]]))
    pts = [np.array([t, 1.0]) for t in ts]
    before = cross_ratio(*pts)
    after = cross_ratio(*[apply(g, p).coords for p in pts])
    assert after == pytest.approx(before, rel=1e-10)


def test_apply_examples():
    p = ProjPoint([Fr(1), Fr(1)])
    assert apply(ProjMap.identity(1), p) == p
    g = ProjMap([[2, 0], [0, 1]])
    assert apply(g, p) == ProjPoint([2, 1])
    q = ProjPoint([3, -1, 2])
    h = ProjMap([[1, 2, 0], [0, 1, 1], [1, 0, 1]])
    assert apply(h.inverse(), apply(h, q)) == q


def test_apply_dual_examples():
    h = Hyperplane([1, 0])
    assert apply_dual(ProjMap.identity(1), h) == h
    assert apply_dual(ProjMap([[2, 0], [0, 1]]), h) == Hyperplane([Fr(1, 2), 0])


@given(invertible(3), st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_apply_dual_preserves_incidence(g, p, h):
    if not any(p) or not any(h):
        return
    before = incidence(np.array(p, dtype=object), np.array(h, dtype=object))
    after = incidence(apply(g, p), apply_dual(g, h))
    assert (before == 0) == (after == 0)


@given(st.lists(small, min_size=3, max_size=3), st.integers(-5, 5))
def test_normalization_idempotent_and_scale_free(v, k):
    if not any(v) or k == 0:
        return
    p = ProjPoint(v)
    n = p.normalized()
    assert n.normalized().coords.tolist() == n.coords.tolist()
    assert ProjPoint([k * x for x in v]).normalized().coords.tolist() == n.coords.tolist()
    assert n == p


def test_general_position():
    assert general_position(np.eye(3, dtype=int))
    assert not general_position([[1, 0, 1], [0, 1, 1], [1, 1, 2]])
    half = Fr(1, 2)
    corner = [[half, half, 0, 0], [half, 0, half, 0], [half, 0, 0, half]]
    assert general_position(corner)


def test_chart_coords():
    chart = AffineChart([0, 1])
    assert chart_coords(chart, [2, 2]) == [1]
    c3 = AffineChart([1, 1, 1])
    p = np.array([Fr(1, 2), Fr(1, 4), Fr(1, 4)])
    u = chart_coords(c3, p)
    assert chart_coords(c3, 7 * p).tolist() == u.tolist()
    assert c3.lift(u).tolist() == p.tolist()
    with pytest.raises(PointAtInfinity):
        chart_coords(chart, [1, 0])


def test_singular_map_rejected():
    with pytest.raises(SingularMap):
        ProjMap([[1, 2], [2, 4]])


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        ProjPoint([0, 0, 0])
