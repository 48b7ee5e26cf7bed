"""Exception types shared across the package."""


class AxialGenError(Exception):
    """Base class for all axialgen errors."""


class GeometryError(AxialGenError):
    """Invalid geometric input or operation."""


class DegenerateRing(GeometryError):
    pass


class SelfIntersectingRing(GeometryError):
    pass


class HoleOutsideOuter(GeometryError):
    pass


class OverlappingHoles(GeometryError):
    pass


class NestedHoles(GeometryError):
    pass


class ViewpointOutsideFreeSpace(GeometryError):
    pass


class PointOutsideFreeSpace(GeometryError):
    pass


class SeedOutsideFreeSpace(GeometryError):
    pass


class NonPositiveCellSize(AxialGenError):
    pass


class InsufficientSamples(AxialGenError):
    pass


class DegenerateBucket(AxialGenError):
    pass


class InvalidStrategy(AxialGenError):
    pass


class ParseError(AxialGenError):
    """Input file could not be parsed."""


class NoPolygonFound(ParseError):
    pass


class ValidationError(AxialGenError):
    """Parsed input failed geometric validation."""
