"""Market/preference inputs, derived constants, and regime classification.

The model is a Black-Scholes market (risk-free rate r, excess return mu,
volatility sigma) with CRRA utility c**p / p and a consumption cap
c <= k*x + ell.  Everything downstream keys off two derived constants,

    theta = mu**2 / (2 sigma**2 (1-p)),
    kappa = (beta - p (theta + r)) / (1 - p),

and on which of five regimes the inputs fall into:

    ILL_POSED          kappa <= 0: the value is infinite.
    MERTON_EQUIVALENT  k >= kappa > 0: the cap never binds.
    HOMOGENEOUS        ell = 0, 0 < k < kappa: closed form, cap always binds.
    MAIN               kappa > k > 0, ell > 0, kappa >= k + r: free boundary.
    UNSUPPORTED        kappa > k > 0, ell > 0, kappa < k + r (open problem),
                       or k = 0 with ell > 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import InvalidParameterError


class Regime(str, Enum):
    ILL_POSED = "ILL_POSED"
    MERTON_EQUIVALENT = "MERTON_EQUIVALENT"
    HOMOGENEOUS = "HOMOGENEOUS"
    MAIN = "MAIN"
    UNSUPPORTED = "UNSUPPORTED"


CONFIG_KEYS = ("r", "mu", "sigma", "beta", "p", "k", "ell")


@dataclass(frozen=True)
class ModelParams:
    """Raw market, preference, and constraint inputs.

    Rates are per unit time; sigma is per sqrt(time); ell is wealth/time.
    """

    r: float      # risk-free rate
    mu: float     # excess return of the risky asset over r
    sigma: float  # volatility of the risky asset
    beta: float   # subjective discount rate
    p: float      # CRRA exponent, utility U(c) = c**p / p
    k: float      # cap slope
    ell: float    # cap intercept

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = (
            (self.r > 0, "r > 0"),
            (self.sigma > 0, "sigma > 0"),
            (self.mu > 0, "mu > 0"),
            (self.beta > 0, "beta > 0"),
            (0 < self.p < 1, "0 < p < 1"),
            (self.k >= 0, "k >= 0"),
            (self.ell >= 0, "ell >= 0"),
            (self.k + self.ell > 0, "k + ell > 0"),
        )
        for ok, name in checks:
            if not ok:
                raise InvalidParameterError(
                    f"parameter invariant violated: {name}"
                )
        for name in CONFIG_KEYS:
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"parameter {name} is not finite")

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        missing = [key for key in CONFIG_KEYS if key not in data]
        if missing:
            raise InvalidParameterError(
                f"config missing keys: {', '.join(missing)}"
            )
        unknown = [key for key in data if key not in CONFIG_KEYS]
        if unknown:
            raise InvalidParameterError(
                f"config has unknown keys: {', '.join(unknown)}"
            )
        try:
            values = {key: float(data[key]) for key in CONFIG_KEYS}
        except (TypeError, ValueError) as exc:
            raise InvalidParameterError(f"non-numeric config value: {exc}")
        return cls(**values)

    @classmethod
    def from_json(cls, path: str | Path) -> "ModelParams":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise InvalidParameterError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in CONFIG_KEYS}


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from ModelParams, plus the regime tag.

    lambda_plus > 1 and lambda_minus < 0 are the roots of

        f(lam) = theta*lam*(lam-1) + (r - beta + p*theta)*lam + r*(p-1),

    the characteristic polynomial of the consumption-to-wealth map in the
    unconstrained region.  a_inf is the coefficient of the power-law tail
    a_inf * x**p that the value function approaches for large wealth when
    the cap binds; it coincides with the ell = 0 closed-form coefficient.
    """

    params: ModelParams
    theta: float
    kappa: float
    eta: float | None
    merton_fraction: float
    lambda_plus: float
    lambda_minus: float
    x_e: float | None
    a_inf: float
    regime: Regime

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "kappa": self.kappa,
            "eta": self.eta,
            "merton_fraction": self.merton_fraction,
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "x_e": self.x_e,
            "a_inf": self.a_inf,
            "regime": self.regime.value,
        }


def _characteristic_roots(theta: float, r: float, beta: float, p: float):
    """Roots of theta*lam**2 + (r - beta + p*theta - theta)*lam + r*(p-1).

    Computed with the cancellation-safe quadratic form: the larger-magnitude
    root first, the other via the product r*(p-1)/theta.
    """
    a = theta
    b = r - beta + p * theta - theta
    c = r * (p - 1.0)
    disc = b * b - 4.0 * a * c  # > 0: c < 0 and a > 0
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    root1 = q / a
    root2 = c / q
    return (max(root1, root2), min(root1, root2))


def classify(params: ModelParams, kappa: float) -> Regime:
    """Assign the regime tag.  Total on valid parameters."""
    if kappa <= 0.0:
        return Regime.ILL_POSED
    if params.k >= kappa:
        return Regime.MERTON_EQUIVALENT
    if params.ell == 0.0:
        return Regime.HOMOGENEOUS
    if params.k == 0.0:
        return Regime.UNSUPPORTED
    if kappa >= params.k + params.r:
        return Regime.MAIN
    return Regime.UNSUPPORTED


def derive(params: ModelParams) -> DerivedConstants:
    """Compute all derived constants and classify the regime.

    Raises InvalidParameterError if params violate their invariants.
    """
    params.validate()
    r, mu, sigma, beta, p, k, ell = (
        params.r, params.mu, params.sigma, params.beta,
        params.p, params.k, params.ell,
    )
    theta = mu * mu / (2.0 * sigma * sigma * (1.0 - p))
    kappa = (beta - p * (theta + r)) / (1.0 - p)
    merton_fraction = mu / (sigma * sigma * (1.0 - p))
    lam_plus, lam_minus = _characteristic_roots(theta, r, beta, p)

    # residual sanity on the root computation
    def f(lam):
        return theta * lam * (lam - 1.0) + (r - beta + p * theta) * lam + r * (p - 1.0)

    scale = theta * max(lam_plus * lam_plus, 1.0) + abs(r * (p - 1.0))
    for lam in (lam_plus, lam_minus):
        if abs(f(lam)) > 1e-12 * scale:
            raise ArithmeticError(
                f"characteristic root residual too large: f({lam}) = {f(lam)}"
            )

    eta = None
    if kappa > 0.0 and k > 0.0:
        eta = (k / (kappa * (1.0 - p) + k * p)) ** (1.0 / (p - 1.0)) * kappa
    x_e = ell / (r - k) if r > k else None
    a_inf = 0.0
    if kappa * (1.0 - p) + k * p > 0.0:
        a_inf = k ** p / (p * (kappa * (1.0 - p) + k * p))

    regime = classify(params, kappa)
    if regime is Regime.MAIN:
        # guaranteed by theory; a failure here means a coding error
        assert eta is not None and eta > kappa
        assert lam_plus > 1.0 and lam_minus < 0.0

    return DerivedConstants(
        params=params,
        theta=theta,
        kappa=kappa,
        eta=eta,
        merton_fraction=merton_fraction,
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        x_e=x_e,
        a_inf=a_inf,
        regime=regime,
    )


def free_boundary_bracket(consts: DerivedConstants) -> tuple[float, float]:
    """Interval [ell/(eta-k), ell/(kappa-k)] that contains the free boundary."""
    params = consts.params
    if consts.regime is not Regime.MAIN:
        raise InvalidParameterError(
            f"free boundary bracket only exists in the MAIN regime, got {consts.regime.value}"
        )
    lo = params.ell / (consts.eta - params.k)
    hi = params.ell / (consts.kappa - params.k)
    return lo, hi
