"""Exception hierarchy shared across the package."""


class DcovarError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(DcovarError, ValueError):
    """A model parameter lies outside its admissible domain."""


class DomainError(DcovarError, ValueError):
    """A function argument lies outside the operation's domain."""


class BoundaryError(DomainError):
    """Evaluation requested exactly on a boundary where the value is undefined."""


class BracketError(DcovarError, ValueError):
    """Root bracketing failed: no sign change on the given interval."""


class ConvergenceError(DcovarError, RuntimeError):
    """A numerical routine did not reach the requested tolerance.

    The best estimate found so far is carried in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InfiniteMeanError(DcovarError, ValueError):
    """A mean-based operation was requested for a distribution without a finite mean."""


class DegenerateRegionError(DcovarError, ValueError):
    """The conditioning rectangle carries (numerically) zero probability mass."""


class DataError(DcovarError, ValueError):
    """Input data is malformed; ``row`` holds the offending index when known."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class FitError(DcovarError, RuntimeError):
    """Maximum-likelihood fitting failed."""
