"""Exception types shared across the package."""


class TopogroupError(Exception):
    """Base class for all package-specific errors."""


class EmptyInputError(TopogroupError):
    """No points were supplied."""


class RaggedDimensionsError(TopogroupError):
    """Points do not share a common ambient dimension."""


class NonFiniteCoordinateError(TopogroupError):
    """A coordinate is NaN or infinite."""


class VertexSimplexError(TopogroupError):
    """An edge-level query was made on a 0-simplex."""


class DimensionTooLargeError(TopogroupError):
    """Requested homology dimension above the supported ceiling."""


class InconsistentFiltrationError(TopogroupError):
    """A simplex appears before one of its faces, or a face is missing."""


class InfiniteLossError(TopogroupError):
    """An essential (never-dying) class entered a finite loss sum."""


class StaleWeightsError(TopogroupError):
    """Regularizer weights were built for a different cloud shape."""


class DegeneratePairError(TopogroupError):
    """A weighted pair has (near-)zero current distance; its gradient is undefined."""


class DegenerateEdgeError(TopogroupError):
    """A critical edge has (near-)zero length; its gradient is undefined."""


class NonFiniteGradientError(TopogroupError):
    """A gradient evaluation produced NaN or infinity."""


class InvalidGeometryError(TopogroupError):
    """A generated dataset violates its documented geometric guarantees."""
