"""Exception types raised across the package."""


class SLCurvError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SLCurvError, ValueError):
    """Non-finite or malformed numerical input."""


class DomainError(SLCurvError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ImmersionDegeneracyError(SLCurvError):
    """The differential of a chart map lost rank."""


class RefinementNeededError(SLCurvError):
    """Grid discretization is not an M-matrix; refine the grid."""


class NewtonDivergenceError(SLCurvError):
    """Newton iteration failed to reach the requested residual."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ProfileStop(SLCurvError):
    """A revolution profile reached a geometric endpoint."""

    reason = "stop"


class AxisSingularityError(ProfileStop, DomainError):
    """The profile reached the rotation axis (``r <= r_min``)."""

    reason = "axis"


class CurvatureBlowupError(ProfileStop, DomainError):
    """The angle deficit left ``(-pi/2, pi/2)``: meridian curvature diverges."""

    reason = "curvature-blowup"
