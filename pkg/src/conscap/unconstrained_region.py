"""Closed-form consumption-to-wealth map on the unconstrained region.

Below the free boundary the optimal consumption c and wealth x are linked by
the invertible map

    X(c) = c/kappa - B * c**lam,    0 < c <= c_star = k*x_star + ell,

where lam > 1 is the positive characteristic root and

    B = ((k - kappa)*x_star + ell) / (kappa * c_star**lam) >= 0.

Along the map, V_x(X(c)) = c**(p-1), which yields V and V_xx in closed form.
Everything here is parameterised by a *candidate* boundary so the shooting
solver can evaluate trial boundaries; powers are evaluated in the ratio form
(c/c_star)**lam, which stays bounded for large lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BracketError
from .market_model import DerivedConstants, Regime, free_boundary_bracket

#: slack applied to the admissible interval for a candidate boundary, so the
#: exact endpoints (computed in floating point) are accepted
_BRACKET_RTOL = 1e-9


@dataclass(frozen=True)
class UMap:
    """Consumption-to-wealth map for one candidate free boundary.

    ``amplitude`` is (k - kappa)*x_star + ell = kappa * B * c_star**lam; the
    map is evaluated as X(c) = c/kappa - (amplitude/kappa)*(c/c_star)**lam to
    avoid overflow in c**lam when lam is large.
    """

    x_star_candidate: float
    c_star: float
    B: float
    lambda_plus: float
    amplitude: float
    kappa: float
    k: float
    ell: float
    p: float


def build_umap(x_star_candidate: float, consts: DerivedConstants) -> UMap:
    """Construct the map coefficients for a candidate boundary.

    The candidate must lie in [ell/(eta-k), ell/(kappa-k)]; outside that
    interval the map would not be monotone up to the cap.
    """
    if consts.regime is not Regime.MAIN:
        raise BracketError(
            f"unconstrained-region map requires the MAIN regime, got {consts.regime.value}"
        )
    lo, hi = free_boundary_bracket(consts)
    slack = _BRACKET_RTOL * (hi - lo)
    if not (lo - slack <= x_star_candidate <= hi + slack):
        raise BracketError(
            f"candidate boundary {x_star_candidate} outside [{lo}, {hi}]"
        )
    params = consts.params
    k, ell, kappa = params.k, params.ell, consts.kappa
    lam = consts.lambda_plus
    c_star = k * x_star_candidate + ell
    amplitude = (k - kappa) * x_star_candidate + ell
    B = amplitude / (kappa * c_star ** lam)
    umap = UMap(
        x_star_candidate=x_star_candidate,
        c_star=c_star,
        B=B,
        lambda_plus=lam,
        amplitude=amplitude,
        kappa=kappa,
        k=k,
        ell=ell,
        p=params.p,
    )
    x_back = x_of_c(c_star, umap)
    if abs(x_back - x_star_candidate) > 1e-12 * max(1.0, abs(x_star_candidate)):
        raise ArithmeticError(
            f"map does not return the candidate: X(c_star) = {x_back} != {x_star_candidate}"
        )
    return umap


def _check_c(c: float, umap: UMap) -> None:
    if not (0.0 < c <= umap.c_star * (1.0 + 1e-12)):
        raise ValueError(
            f"consumption {c} outside the map domain (0, {umap.c_star}]"
        )


def x_of_c(c: float, umap: UMap) -> float:
    """Wealth X(c) = c/kappa - (amplitude/kappa) * (c/c_star)**lam."""
    _check_c(c, umap)
    ratio = c / umap.c_star
    return (c - umap.amplitude * ratio ** umap.lambda_plus) / umap.kappa


def xprime_of_c(c: float, umap: UMap) -> float:
    """Derivative X'(c) = 1/kappa - B*lam*c**(lam-1), in ratio form."""
    _check_c(c, umap)
    lam = umap.lambda_plus
    ratio = c / umap.c_star
    return (1.0 - lam * (umap.amplitude / umap.c_star) * ratio ** (lam - 1.0)) / umap.kappa


def c_of_x(x: float, umap: UMap) -> float:
    """Invert the map: the consumption with X(c) = x, for 0 < x <= x_star.

    Monotonicity of X gives the analytic bracket kappa*x <= c <= k*x + ell.
    """
    if not (0.0 < x <= umap.x_star_candidate * (1.0 + 1e-12)):
        raise ValueError(
            f"wealth {x} outside the unconstrained range (0, {umap.x_star_candidate}]"
        )
    c_lo = umap.kappa * x * (1.0 - 1e-12)
    c_hi = min(umap.k * x + umap.ell, umap.c_star)
    f_lo = x_of_c(c_lo, umap) - x
    f_hi = x_of_c(c_hi, umap) - x
    if f_lo == 0.0:
        return c_lo
    if f_hi == 0.0:
        return c_hi
    if f_lo > 0.0 or f_hi < 0.0:
        raise BracketError(
            f"inverse map bracket failed at x = {x}: f({c_lo}) = {f_lo}, f({c_hi}) = {f_hi}"
        )
    c = brentq(lambda cc: x_of_c(cc, umap) - x, c_lo, c_hi,
               xtol=1e-300, rtol=8.9e-16, maxiter=200)
    residual = abs(x_of_c(c, umap) - x)
    if residual > 1e-10 * max(1.0, x):
        raise ArithmeticError(
            f"inverse map residual {residual} too large at x = {x}"
        )
    return c


def value_on_U(c: float, umap: UMap, consts: DerivedConstants):
    """(V, V_x, V_xx) at the wealth X(c), for 0 < c <= c_star.

    V_x = c**(p-1) and V_xx = (p-1)*c**(p-2)/X'(c) follow from
    differentiating V_x(X(c)) = c**(p-1); V comes from the unconstrained
    region's own ODE,

        beta*V = theta*c**p*X'(c) + r*c**(p-1)*X(c) - ((p-1)/p)*c**p.
    """
    _check_c(c, umap)
    params = consts.params
    p = params.p
    xp = xprime_of_c(c, umap)
    x = x_of_c(c, umap)
    cp1 = c ** (p - 1.0)
    cp = cp1 * c
    vx = cp1
    vxx = (p - 1.0) * (cp1 / c) / xp
    v = (consts.theta * cp * xp + params.r * cp1 * x - (p - 1.0) / p * cp) / params.beta
    return v, vx, vxx
