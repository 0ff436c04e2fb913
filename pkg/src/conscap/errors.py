"""Exception hierarchy for the solver.

Errors are split along the CLI exit-code boundaries: bad inputs,
regimes the solver declines to handle, and numerical failures.
"""

from __future__ import annotations


class ConscapError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ConscapError):
    """A model parameter violates its admissibility condition."""


class IllPosedError(InvalidParameterError):
    """The discounted problem has infinite value (kappa <= 0)."""


class UnsupportedRegimeError(ConscapError):
    """Parameter regime the solver deliberately does not attempt.

    Covers kappa < k + r (no known solution structure) and the
    k = 0, ell > 0 case.
    """

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class RegimeError(ConscapError):
    """An operation was invoked for a regime it does not apply to."""


class BracketError(ConscapError):
    """A candidate free boundary lies outside the admissible interval."""


class NoSignChangeError(BracketError):
    """Shooting residuals at both bracket ends have the same sign."""

    def __init__(self, message: str, residual_lo: float, residual_hi: float):
        super().__init__(message)
        self.residual_lo = residual_lo
        self.residual_hi = residual_hi


class DualIntegrationError(ConscapError):
    """Dual-variable integration left its admissible set.

    Carries the partial trajectory (a DualTrajectory) and the dual
    point where integration stopped.
    """

    def __init__(self, message: str, y_fail: float, trajectory=None):
        super().__init__(message)
        self.y_fail = y_fail
        self.trajectory = trajectory


class BranchViolationError(DualIntegrationError):
    """Capped-consumption branch stopped being the binding one."""


class ConvexityLossError(DualIntegrationError):
    """Recovered dual curvature became nonpositive away from x_e."""


class NonConvergenceError(ConscapError):
    """Iterative solver failed to reach its tolerance."""


class ConcavityError(ConscapError):
    """A discrete solution lost concavity."""

    def __init__(self, message: str, node_index: int | None = None):
        super().__init__(message)
        self.node_index = node_index


class ExtrapolationError(ConscapError):
    """Query beyond the stored dual trajectory.

    ``fallback_value`` holds the power-law tail value a_inf * x**p so a
    caller may opt in to the labelled asymptotic answer.
    """

    def __init__(self, message: str, fallback_value: float):
        super().__init__(message)
        self.fallback_value = fallback_value


class PolicyConstraintError(ConscapError):
    """A simulated policy emitted consumption above its cap."""

    def __init__(self, message: str, t: float, x: float, c: float):
        super().__init__(message)
        self.t = t
        self.x = x
        self.c = c
