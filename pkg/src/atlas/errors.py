"""Exception types shared across the package.

Every error raised on bad mathematical input derives from
:class:`AtlasError`; the CLI maps these to exit status 2.
"""


class AtlasError(ValueError):
    """Base class for validation failures."""


class ZeroVector(AtlasError):
    pass


class NonPrimitive(AtlasError):
    pass


class Degenerate(AtlasError):
    pass


class BadInput(AtlasError):
    pass


class NotZCF(AtlasError):
    pass


class NoRealFixedPoint(AtlasError):
    pass


class EmptyIntersection(AtlasError):
    pass


class DegenerateIntersection(AtlasError):
    pass


class NonCompactEdge(AtlasError):
    pass


class CornerAlreadyDelzant(AtlasError):
    pass


class SizesTooLarge(AtlasError):
    pass


class NonIntegralPolygon(AtlasError):
    pass


class InvalidDiagram(AtlasError):
    pass


class NotDelzant(AtlasError):
    pass


class CutObstructed(AtlasError):
    pass


class NotTSingularity(AtlasError):
    pass


class PositionsInvalid(AtlasError):
    pass


class OffEigenline(AtlasError):
    pass


class Collision(AtlasError):
    pass


class LeavesDiagram(AtlasError):
    pass


class EigenlineExitsThroughCut(AtlasError):
    pass


class SegmentTooLong(AtlasError):
    pass


class NotchObstructed(AtlasError):
    pass


class ChainNotTType(AtlasError):
    pass


class UnTruncationFails(AtlasError):
    pass


class SegmentsCross(AtlasError):
    pass


class UnsupportedShape(AtlasError):
    pass


class IrrationalDirection(AtlasError):
    pass


class InteriorObstructed(AtlasError):
    pass


class Tangent(AtlasError):
    pass


class Unbalanced(AtlasError):
    pass


class BadTermination(AtlasError):
    pass


class NonPositive(AtlasError):
    pass


class NotMarkov(AtlasError):
    pass


class NonIntegralMutation(AtlasError):
    pass


class IrrationalLengths(AtlasError):
    pass


class EigenrayDegenerate(AtlasError):
    pass


class NotSL2(AtlasError):
    pass


class FiniteOrderUnsupported(AtlasError):
    pass


class BadRange(AtlasError):
    pass


class InvalidDocument(AtlasError):
    pass
