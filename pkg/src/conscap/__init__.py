"""Optimal consumption-investment under a linear consumption cap.

Solves the infinite-horizon CRRA consumption-investment problem in which
the consumption rate may not exceed k*x + ell, locating the free boundary
between the unconstrained and capped regions, and cross-checks the result
with a finite-difference solver and a Monte Carlo simulator.
"""

from .closed_forms import (
    PolicyPoint,
    homogeneous_policy,
    homogeneous_value,
    merton_policy,
    merton_value,
)
from .errors import (
    BracketError,
    BranchViolationError,
    ConscapError,
    ConvexityLossError,
    ExtrapolationError,
    IllPosedError,
    InvalidParameterError,
    NoSignChangeError,
    NonConvergenceError,
    PolicyConstraintError,
    RegimeError,
    UnsupportedRegimeError,
)
from .free_boundary import (
    DualTrajectory,
    ValueSolution,
    integrate_dual,
    shooting_residual,
    solve_x_star,
)
from .market_model import (
    DerivedConstants,
    ModelParams,
    Regime,
    classify,
    derive,
    free_boundary_bracket,
)
from .value_function import (
    FeedbackPolicy,
    derivative,
    evaluate,
    hjb_residual,
    make_policy,
    policy,
    region,
    second_derivative,
    value,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "BranchViolationError",
    "ConscapError",
    "ConvexityLossError",
    "DerivedConstants",
    "DualTrajectory",
    "ExtrapolationError",
    "FeedbackPolicy",
    "IllPosedError",
    "InvalidParameterError",
    "ModelParams",
    "NoSignChangeError",
    "NonConvergenceError",
    "PolicyConstraintError",
    "PolicyPoint",
    "Regime",
    "RegimeError",
    "UnsupportedRegimeError",
    "ValueSolution",
    "classify",
    "derivative",
    "derive",
    "evaluate",
    "free_boundary_bracket",
    "hjb_residual",
    "homogeneous_policy",
    "homogeneous_value",
    "integrate_dual",
    "make_policy",
    "merton_policy",
    "merton_value",
    "policy",
    "region",
    "second_derivative",
    "shooting_residual",
    "solve_x_star",
    "value",
    "__version__",
]
