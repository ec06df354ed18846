"""Exception types shared across the package."""


class FriedrichsError(Exception):
    """Base class for all library errors."""


class BoundStateError(FriedrichsError):
    """The coupling is strong enough to pull a discrete state below the
    continuum; the pure-decay machinery does not apply."""

    def __init__(self, margin: float):
        self.margin = margin
        super().__init__(
            f"bound state present: dimensionless margin {margin:.6g} <= 0"
        )


class ConvergenceError(FriedrichsError):
    """A numerical procedure did not reach its accuracy target.

    Carries whatever was achieved so callers can decide whether to accept
    a degraded result.
    """

    def __init__(self, message: str, achieved=None, last_iterate=None, residual=None):
        self.achieved = achieved
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__(message)


class ExpansionUnavailableError(FriedrichsError):
    """A short-time expansion needs a moment that does not exist."""

    def __init__(self, moment_name: str):
        self.moment_name = moment_name
        super().__init__(
            f"short-time expansion unavailable: required moment {moment_name} diverges"
        )


class ContinuationUnsupportedError(FriedrichsError):
    """Analytic continuation through the cut is not defined for this formfactor."""


class EngineMismatchError(FriedrichsError):
    """The requested amplitude engine does not apply to this formfactor."""
