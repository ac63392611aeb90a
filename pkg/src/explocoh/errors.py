"""Exception types shared by the whole engine."""


class ExplocohError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(ExplocohError):
    """A matrix or vector has the wrong shape for the requested operation."""


class EmptyPolytopeError(ExplocohError):
    """The operation needs a nonempty polytope."""


class UnsupportedFanError(ExplocohError):
    """The fan is not complete/smooth/pointed as required."""


class GluingError(ExplocohError):
    """Gluing data does not induce a well defined map on cohomology models."""


class DualityUnavailableError(ExplocohError):
    """A polytope fails the complete-and-no-lines duality hypothesis."""


class UnsupportedGluingError(ExplocohError):
    """The manifest declares a gluing class the engine refuses to compute."""


class InconsistentNerveError(ExplocohError):
    """Overlap subsets of a cover manifest are not downward closed."""


class DimensionMismatchError(ExplocohError):
    """Charts of a cover disagree on the total dimension."""


class ManifestError(ExplocohError):
    """A manifest, fan, chart or map file failed to parse or validate."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class FormParseError(ExplocohError):
    """A form expression failed to parse; carries the character position."""

    def __init__(self, message, pos):
        self.pos = pos
        super().__init__("%s (at position %d)" % (message, pos))


class DivergenceSuspectedError(ExplocohError):
    """Quadrature refinement failed to converge within the depth limit."""


class NotAFamilyError(ExplocohError):
    """The declared projection is not a family over the base chart."""


class IntegralVectorSurjectivityError(ExplocohError):
    """The tropical projection is not surjective on recession lattices."""


class NotTransverseError(ExplocohError):
    """The two maps into the common target are not transverse."""


class UnsupportedFormError(ExplocohError):
    """A form is outside the class an operation can handle."""
