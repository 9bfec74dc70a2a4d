"""Exception types shared across the package."""


class PolyGreenError(Exception):
    """Base class for all package errors."""


class InvalidCurveError(PolyGreenError):
    """A curve fails a structural invariant (too few points, non-finite data)."""


class InvalidArgumentError(PolyGreenError, ValueError):
    """An argument is out of its documented range."""


class InvalidCageError(PolyGreenError):
    """A cage fails validation; carries the validation report."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class OnBoundaryError(PolyGreenError):
    """The query point lies on the curve itself."""


class EndpointSingularityError(PolyGreenError):
    """The query point coincides with a curve extremity, where the
    log kernel is singular."""


class RootFindingError(PolyGreenError):
    """Root residuals stayed above tolerance after polishing."""

    def __init__(self, message, coeffs=None):
        self.coeffs = coeffs
        super().__init__(message)


class WrongClassificationError(PolyGreenError):
    """A residue routine was called with a root of the wrong class."""


class OracleFailureError(PolyGreenError):
    """Adaptive quadrature failed to meet its error bound."""


class ShapeMismatchError(PolyGreenError):
    """Curve counts or orders disagree between a field and a deformed cage."""


class NeedsRecomputeError(PolyGreenError):
    """The requested target order exceeds the precomputed ceiling."""
