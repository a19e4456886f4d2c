"""Exception types shared across the library.

Every failure mode that callers are expected to handle gets its own class so
that CLI exit codes and tests can dispatch on type rather than message text.
"""


class Su2HeatError(Exception):
    """Base class for all library errors."""


class DomainError(Su2HeatError):
    """Input outside the documented domain of an operation."""


class DegenerateChartWarning(UserWarning):
    """Chart inverse at a point where theta or z is not identifiable;
    the documented canonical choice (angle set to 0) was applied."""


class SingularAtBoundary(DomainError):
    """Operator evaluated at a chart boundary where a coefficient has a pole."""


class PoleAtOrigin(DomainError):
    """Green function requested at its pole (r, z) = (0, 0)."""


class NoBracketError(Su2HeatError):
    """Root bracketing failed; indicates input outside preconditions."""


class NegativeCurvatureTerm(Su2HeatError):
    """An asserted-positive saddle-point factor came out nonpositive."""


class ConvergenceError(Su2HeatError):
    """Base for iteration/truncation failures."""


class QuadratureNotConverged(ConvergenceError):
    """Adaptive quadrature exhausted its refinement budget above tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TruncationCapError(ConvergenceError):
    """A series truncation plan would exceed the configured degree caps."""


class OverflowGuard(ConvergenceError):
    """A direct evaluation would overflow; use the log-domain variant."""


class SlowDecayError(ConvergenceError):
    """Integrand tail decays too slowly to meet tolerance within the cap."""
