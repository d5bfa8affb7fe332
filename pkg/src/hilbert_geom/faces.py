"""Exposed faces of polytope domains and their duals.

Everything here is exact.  A face is identified by the set of vertices it
contains; the set of facets containing it determines it just as well, and
the dual face of K in the polar polytope is the face spanned by exactly
those facets.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .domain import ConvexDomain, Ellipsoid, Polytope
from .errors import NotOnBoundary, UnsupportedDomain
from .projective import Hyperplane, ProjPoint


@dataclass(frozen=True)
class Face:
    """An exposed face of a domain's boundary.

    ``vertex_ids`` and ``facet_ids`` index the owning polytope's vertex and
    facet lists.  ``witness`` is a supporting hyperplane meeting the closure
    exactly in this face.  For ellipsoids the face is a single boundary
    point and both index sets are empty.
    """

    vertex_ids: frozenset
    facet_ids: frozenset
    dim: int
    dual_dim: int
    supporting_subspace: tuple = field(compare=False)
    witness: Hyperplane = field(compare=False)
    domain: ConvexDomain = field(compare=False, repr=False, default=None)

    def __hash__(self):
        return hash((self.vertex_ids, self.facet_ids, self.dim))


@dataclass(frozen=True)
class DualFace:
    """Face of the polar domain made of all supporting hyperplanes of ``primal``."""

    face: Face
    primal: Face
    domain: ConvexDomain = field(repr=False)

    @property
    def dim(self) -> int:
        return self.face.dim


class Case(enum.Enum):
    EQUAL = "Equal"
    DISJOINT = "Disjoint"
    BOUNDARY_INCLUSION = "BoundaryInclusion"
    PROPER_MEETING = "ProperMeeting"


@dataclass(frozen=True)
class Classification:
    case: Case
    meet: Face | None = None

    def __str__(self):
        if self.meet is None:
            return self.case.value
        return f"{self.case.value}({sorted(self.meet.vertex_ids)})"


def _require_polytope(domain):
    if not isinstance(domain, Polytope):
        raise UnsupportedDomain("face lattices are computed for polytopes only")


def make_face(polytope: Polytope, vertex_ids) -> Face:
    """Face of ``polytope`` spanned by the given vertices (must be a face)."""
    vids = frozenset(int(i) for i in vertex_ids)
    inc = polytope.incidence
    fids = frozenset(i for i in range(inc.shape[0]) if all(inc[i, j] for j in vids))
    verts = polytope.vertex_array[sorted(vids)]
    facs = polytope.facet_array[sorted(fids)]
    reduced, pivots = linalg.rref(np.array(list(verts), dtype=object))
    basis = tuple(ProjPoint(reduced[k]) for k in range(len(pivots)))
    witness = Hyperplane(np.sum(facs, axis=0))
    return Face(
        vertex_ids=vids,
        facet_ids=fids,
        dim=len(pivots) - 1,
        dual_dim=linalg.rank(np.array(list(facs), dtype=object)) - 1,
        supporting_subspace=basis,
        witness=witness,
        domain=polytope,
    )


class FaceLattice:
    """All nonempty proper faces of a polytope ordered by inclusion."""

    def __init__(self, polytope: Polytope):
        _require_polytope(polytope)
        self.polytope = polytope
        inc = polytope.incidence
        n_vertices = inc.shape[1]
        seeds = {frozenset(np.nonzero(row)[0].tolist()) for row in inc}
        found = set(seeds)
        frontier = list(seeds)
        while frontier:
            new = []
            for a in frontier:
                for b in seeds:
                    c = a & b
                    if c and c not in found:
                        found.add(c)
                        new.append(c)
            frontier = new
        found.discard(frozenset(range(n_vertices)))
        faces = [make_face(polytope, vs) for vs in found]
        faces.sort(key=lambda f: (-f.dim, sorted(f.vertex_ids)))
        self.faces = faces
        self._by_vertices = {f.vertex_ids: f for f in faces}

    def __iter__(self):
        return iter(self.faces)

    def __len__(self):
        return len(self.faces)

    def __getitem__(self, i) -> Face:
        return self.faces[i]

    def index(self, face: Face) -> int:
        return self.faces.index(self._by_vertices[face.vertex_ids])

    def by_vertices(self, vertex_ids) -> Face:
        return self._by_vertices[frozenset(vertex_ids)]

    def of_dim(self, k) -> list:
        return [f for f in self.faces if f.dim == k]

    def counts(self) -> dict:
        out = {}
        for f in self.faces:
            out[f.dim] = out.get(f.dim, 0) + 1
        return dict(sorted(out.items(), reverse=True))

    def to_dict(self) -> dict:
        return {
            "dim": self.polytope.dim,
            "faces": [
                {
                    "id": i,
                    "dim": f.dim,
                    "vertex_ids": sorted(f.vertex_ids),
                    "facet_ids": sorted(f.facet_ids),
                }
                for i, f in enumerate(self.faces)
            ],
        }


def face_lattice(polytope: Polytope) -> FaceLattice:
    return FaceLattice(polytope)


def face_of_point(domain: ConvexDomain, p, tol=None) -> Face:
    """The face whose relative interior contains the boundary point p."""
    if isinstance(domain, Ellipsoid):
        return _ellipsoid_face(domain, p, tol)
    _require_polytope(domain)
    s = domain.facet_values(p)
    if s is None:
        raise NotOnBoundary("point is at infinity in the domain's chart")
    if s.dtype == object:
        neg = any(x < 0 for x in s)
        tight = [i for i, x in enumerate(s) if x == 0]
    else:
        eps = linalg.resolve_tol(tol)
        neg = bool(np.any(s < -eps))
        tight = [i for i, x in enumerate(s) if abs(x) <= eps]
    if neg:
        raise NotOnBoundary("point lies outside the closure")
    if not tight:
        raise NotOnBoundary("point lies in the open domain")
    inc = domain.incidence
    vids = set(range(inc.shape[1]))
    for i in tight:
        vids &= set(np.nonzero(inc[i])[0].tolist())
    return make_face(domain, vids)


def _ellipsoid_face(domain: Ellipsoid, p, tol):
    from .domain import _raw

    v = _raw(p)
    val = domain.quadratic(v)
    if isinstance(val, float):
        vf = linalg.to_float(v)
        on = abs(val) <= linalg.resolve_tol(tol) * float(vf @ vf) * np.abs(domain._form_float).max()
    else:
        on = val == 0
    if not on:
        raise NotOnBoundary("point is not on the quadric")
    form = domain.form if (domain.exact and v.dtype == object) else domain._form_float
    vv = v if form.dtype == object else linalg.to_float(v)
    point = ProjPoint(vv)
    return Face(frozenset(), frozenset(), 0, 0, (point,), Hyperplane(form.dot(vv)), domain)


def dual_face(polytope: Polytope, face: Face) -> DualFace:
    """Face of the polar polytope formed by the hyperplanes supporting ``face``.

    The polar's vertices are this polytope's facets in the same order, so
    the dual face is spanned by the polar vertices indexed by
    ``face.facet_ids``.
    """
    _require_polytope(polytope)
    polar = polytope.polar
    return DualFace(make_face(polar, face.facet_ids), face, polar)


def is_angular(domain: ConvexDomain, face: Face) -> bool:
    """dim K + dim K* >= d - 1."""
    return face.dim + face.dual_dim >= domain.dim - 1


def classify_pair(polytope: Polytope, first: Face, second: Face) -> Classification:
    """Which of the four mutually exclusive relations holds between two faces.

    Decided on the dual side, from the sets of facets containing each face:
    inclusion of faces reverses inclusion of facet sets, and the meet is cut
    out by the union of the two facet sets.
    """
    _require_polytope(polytope)
    a, b = first.facet_ids, second.facet_ids
    if a == b:
        return Classification(Case.EQUAL)
    if a < b or b < a:
        return Classification(Case.BOUNDARY_INCLUSION)
    inc = polytope.incidence
    union = a | b
    common = [j for j in range(inc.shape[1]) if all(inc[i, j] for i in union)]
    if not common:
        return Classification(Case.DISJOINT)
    return Classification(Case.PROPER_MEETING, make_face(polytope, common))


def polar_vertex_map(polytope: Polytope) -> list:
    """For each facet of the polar polytope, the index of the equal vertex here."""
    polar = polytope.polar
    out = []
    verts = polytope.vertices
    for h in polar.facets:
        hp = ProjPoint(h.coords)
        out.append(next(i for i, v in enumerate(verts) if v.same_as(hp)))
    return out
