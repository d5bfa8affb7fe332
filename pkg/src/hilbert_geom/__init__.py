"""Hilbert geometry of properly convex projective domains.

Exact rational arithmetic where possible, floats elsewhere.  The main entry
points are re-exported here; see the submodules for the rest.
"""
from .domain import (
    ConvexDomain,
    Ellipsoid,
    Polytope,
    boundary_intersections,
    contains,
    dual_domain,
    finsler_norm,
    hilbert_distance,
    transform_domain,
    validate,
)
from .errors import HilbertGeomError
from .faces import Case, Face, FaceLattice, classify_pair, dual_face, face_lattice, face_of_point, is_angular
from .flats import (
    Flat,
    StandardNeighborhood,
    distance_to_flat,
    flat_dual,
    normal_line,
    normal_project,
    phi_map,
    pseudo_dual,
    simplex_distance,
    standard_neighborhood,
    validate_flat,
)
from .group import (
    GeneratorSet,
    GroupElement,
    certify_preserves,
    isometry_check,
    orbit,
    precise_invariance_check,
    stabilizes_flat,
    translation_length,
)
from .projective import AffineChart, Hyperplane, ProjMap, ProjPoint, cross_ratio
from .rng import make_rng

__version__ = "0.1.0"
