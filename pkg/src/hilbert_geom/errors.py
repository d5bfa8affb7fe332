"""Exception hierarchy shared by every module of the package."""


class HilbertGeomError(Exception):
    """Base class for all errors raised by hilbert_geom."""


# projective core
class NotCollinear(HilbertGeomError):
    pass


class DegenerateConfiguration(HilbertGeomError):
    pass


class PointAtInfinity(HilbertGeomError):
    pass


class SingularMap(HilbertGeomError):
    pass


# domains
class NotProperlyConvex(HilbertGeomError):
    """The closure of the candidate domain is not contained in an affine chart.

    ``witness`` is a pair of points spanning a projective line that lies in
    the closure (or ``None`` when the domain is merely degenerate).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInDomain(HilbertGeomError):
    pass


class CoincidentPoints(HilbertGeomError):
    pass


class ZeroVector(HilbertGeomError):
    pass


class DomainFormatError(HilbertGeomError):
    pass


# faces
class NotOnBoundary(HilbertGeomError):
    pass


# flats
class FlatError(HilbertGeomError):
    """Base for flat validation failures; ``witness`` locates the problem."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotGeneralPosition(FlatError):
    pass


class VertexNotOnBoundary(FlatError):
    pass


class InteriorEscapes(FlatError):
    pass


class FaceNotInBoundary(FlatError):
    pass


class NonUniqueSupport(FlatError):
    pass


class NoCommonPoint(FlatError):
    pass


class ProjectionUndefined(HilbertGeomError):
    pass


class UnsupportedDomain(HilbertGeomError):
    """Operation is only defined for another kind of domain."""


class PointOnCarrier(HilbertGeomError):
    pass


class FrameDegenerate(HilbertGeomError):
    pass


# group
class NotAnAutomorphism(HilbertGeomError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonPositiveCoordinate(HilbertGeomError):
    pass


class BudgetExhausted(UserWarning):
    """Local search stopped at its evaluation budget; best value returned."""
