"""Exception hierarchy shared by all modules."""


class StieltjesError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(StieltjesError, ValueError):
    """Input object violates one of its invariants."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class SupportError(StieltjesError, ValueError):
    """A transform was requested on (or numerically on) the support."""


class DomainError(StieltjesError, ValueError):
    """Argument outside the domain of an operation."""


class QuadratureError(StieltjesError):
    """Quadrature did not reach the requested agreement within its node cap."""


class RootFindingError(StieltjesError):
    """Contour root finder could not produce a trustworthy answer."""


class InconsistencyError(RootFindingError):
    """Independent root counts disagree; usually K is too small."""


class BranchTrackingError(StieltjesError):
    """Inverse branch continuation lost track of the branch."""


class RecoveryError(StieltjesError):
    """Coefficient recovery was too ill-conditioned to trust."""


class EndpointError(StieltjesError):
    """No square-root edge was bracketed on the real axis."""
