"""Exact value functions and policies for the regimes that admit them.

Two closed forms exist: the unconstrained (Merton) solution

    V(x) = kappa**(p-1) * x**p / p,   c = kappa*x,   pi = m*x,

with m the fixed risky fraction mu/(sigma**2 (1-p)), and the homogeneous-cap
solution (ell = 0)

    V(x) = min(kappa,k)**p / (p*(kappa*(1-p) + min(kappa,k)*p)) * x**p,
    c = min(kappa,k)*x,   pi = m*x.

These are the ground truth that every numerical route in this package is
checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IllPosedError, RegimeError
from .market_model import DerivedConstants


@dataclass(frozen=True)
class PolicyPoint:
    """Consumption rate and risky allocation at one wealth level."""

    c: float
    pi: float


def power_of_wealth(x: float, p: float) -> float:
    """x**p via exp(p*log(x)), with x = 0 mapped to exact 0.

    Keeps the prescribed boundary value V(0) = 0 free of domain errors.
    """
    if x == 0.0:
        return 0.0
    if x < 0.0:
        raise ValueError(f"wealth must be nonnegative, got {x}")
    return math.exp(p * math.log(x))


def merton_value(x: float, consts: DerivedConstants) -> float:
    """Unconstrained value kappa**(p-1) * x**p / p; upper bound for all regimes."""
    if consts.kappa <= 0.0:
        raise IllPosedError(
            f"value is infinite for kappa = {consts.kappa} <= 0"
        )
    p = consts.params.p
    return consts.kappa ** (p - 1.0) * power_of_wealth(x, p) / p


def merton_policy(x: float, consts: DerivedConstants) -> PolicyPoint:
    """Unconstrained feedback policy (kappa*x, merton_fraction*x)."""
    if x < 0.0:
        raise ValueError(f"wealth must be nonnegative, got {x}")
    return PolicyPoint(c=consts.kappa * x, pi=consts.merton_fraction * x)


def _require_homogeneous(consts: DerivedConstants) -> None:
    params = consts.params
    if params.ell != 0.0 or params.k <= 0.0 or consts.kappa <= 0.0:
        raise RegimeError(
            "homogeneous closed form needs ell = 0, k > 0, kappa > 0; got "
            f"ell={params.ell}, k={params.k}, kappa={consts.kappa}"
        )


def homogeneous_value(x: float, consts: DerivedConstants) -> float:
    """Closed-form value for the proportional cap c <= k*x."""
    _require_homogeneous(consts)
    p = consts.params.p
    kmin = min(consts.kappa, consts.params.k)
    coeff = kmin ** p / (p * (consts.kappa * (1.0 - p) + kmin * p))
    return coeff * power_of_wealth(x, p)


def homogeneous_policy(x: float, consts: DerivedConstants) -> PolicyPoint:
    """Feedback policy (min(kappa,k)*x, merton_fraction*x) for ell = 0."""
    _require_homogeneous(consts)
    if x < 0.0:
        raise ValueError(f"wealth must be nonnegative, got {x}")
    kmin = min(consts.kappa, consts.params.k)
    return PolicyPoint(c=kmin * x, pi=consts.merton_fraction * x)
