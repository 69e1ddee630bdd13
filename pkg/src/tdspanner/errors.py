"""Exception hierarchy shared by every module of the package."""


class SpannerError(Exception):
    """Base class for all errors raised by tdspanner."""


class DegenerateDirection(SpannerError):
    """A direction lies on a cone boundary (general position was skipped)."""


class UndefinedDelta(SpannerError):
    """The requested triangle-vertex distance coincides with the apex."""

    def __init__(self, color):
        super().__init__(f"delta at the {color} vertex is undefined: it is the apex")
        self.color = color


class GeneralPositionFailure(SpannerError):
    """No rotation in the schedule puts the point set in general position."""


class BrokenTriangulation(SpannerError):
    """A structural property of the TD-Delaunay graph does not hold."""


class NotOnPath(SpannerError):
    """A point was expected on a canonical path but is not there."""


class NonTermination(SpannerError):
    """An iterative walk exceeded its step guard."""


class ChargeCollision(SpannerError):
    """Two spanner edges were charged to the same sector of a point."""

    def __init__(self, point, sector, first, second):
        super().__init__(
            f"sector {sector} of point {point} charged by both {first} and {second}"
        )
        self.point = point
        self.sector = sector
        self.edges = (first, second)


class ChargeMismatch(SpannerError):
    """An edge does not lie in the sector its charging rule requires."""


class Disconnected(SpannerError):
    """The graph has more than one connected component."""

    def __init__(self, component):
        super().__init__(f"graph is disconnected; component witness {sorted(component)[:10]}")
        self.component = component


class InvalidSpec(SpannerError):
    """A generator specification is malformed."""


class ParseError(SpannerError):
    """An input file could not be parsed."""


class DuplicatePoint(SpannerError):
    """An input file lists the same point twice."""


class SchemaMismatch(SpannerError):
    """A graph file parsed but violates the graph-file schema."""
