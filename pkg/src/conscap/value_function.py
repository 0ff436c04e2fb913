"""Global value function, derivatives, regions, and the feedback policy.

Assembly from a solved free boundary: below x_star the closed-form
consumption map supplies (V, V_x, V_xx); at and above x_star they are read
off the stored dual trajectory by inverting x = -v_y(y), with

    V = v - y*v_y,   V_x = y,   V_xx = -1/v_yy,

where v_yy is recovered algebraically from the dual ODE so the solution
satisfies the dynamic-programming equation exactly at every query point.
Interpolation over the trajectory is monotone piecewise-cubic in log(y),
which preserves the convexity of v that the inversion relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .closed_forms import PolicyPoint, power_of_wealth
from .errors import ExtrapolationError
from .free_boundary import ValueSolution, dual_curvature
from .unconstrained_region import c_of_x, value_on_U

#: wealth queries within this relative distance of x_star are snapped to it
_BOUNDARY_SNAP = 1e-13


class _DualInterpolant:
    """Monotone cubic interpolation of (v, v_y) over log(y), with an
    inversion cache keyed by wealth rounded to 1e-12 relative."""

    def __init__(self, solution: ValueSolution):
        traj = solution.trajectory
        # stored order: y decreasing, wealth increasing
        self.s_desc = np.log(traj.y)
        self.wealth = traj.wealth
        s_asc = self.s_desc[::-1]
        self.v_of_s = PchipInterpolator(s_asc, traj.v[::-1], extrapolate=False)
        self.w_of_s = PchipInterpolator(s_asc, traj.v_y[::-1], extrapolate=False)
        self.x_max = float(self.wealth[-1])
        self._cache: dict[str, float] = {}

    def s_of_x(self, x: float) -> float:
        key = f"{x:.12e}"
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        i = int(np.searchsorted(self.wealth, x))
        if i == 0:
            s = float(self.s_desc[0])
        elif self.wealth[i - 1] == x:
            s = float(self.s_desc[i - 1])
        else:
            s_hi, s_lo = self.s_desc[i - 1], self.s_desc[i]  # s decreasing
            s = brentq(lambda ss: -float(self.w_of_s(ss)) - x,
                       s_lo, s_hi, xtol=1e-15, rtol=8.9e-16)
        self._cache[key] = s
        return s


@dataclass
class FeedbackPolicy:
    """Optimal controls as functions of wealth.

    Consumption follows the inverse map below the boundary and the cap
    k*x + ell above it; the risky allocation is merton_fraction * x in both
    regions.
    """

    solution: ValueSolution
    merton_fraction: float

    def consumption(self, x: float) -> float:
        if x < 0.0:
            raise ValueError(f"wealth must be nonnegative, got {x}")
        if x == 0.0:
            return 0.0
        params = self.solution.consts.params
        if x >= self.solution.x_star * (1.0 - _BOUNDARY_SNAP):
            return params.k * x + params.ell
        return c_of_x(x, self.solution.umap)

    def allocation(self, x: float) -> float:
        if x < 0.0:
            raise ValueError(f"wealth must be nonnegative, got {x}")
        return self.merton_fraction * x

    def __call__(self, x: float) -> PolicyPoint:
        return PolicyPoint(c=self.consumption(x), pi=self.allocation(x))


def make_policy(solution: ValueSolution) -> FeedbackPolicy:
    return FeedbackPolicy(solution=solution,
                          merton_fraction=solution.consts.merton_fraction)


def region(x: float, solution: ValueSolution) -> str:
    """'U' strictly below the free boundary, 'C' at and above it."""
    if x <= 0.0:
        raise ValueError(f"region is defined for x > 0, got {x}")
    return "U" if x < solution.x_star else "C"


def _interp(solution: ValueSolution) -> _DualInterpolant:
    cached = getattr(solution, "_dual_interp", None)
    if cached is None:
        cached = _DualInterpolant(solution)
        solution._dual_interp = cached
    return cached


def _dual_point(x: float, solution: ValueSolution):
    """(y, v, v_y) on the stored trajectory at wealth x (region C)."""
    interp = _interp(solution)
    if x > interp.x_max * (1.0 + 1e-12):
        consts = solution.consts
        fallback = consts.a_inf * power_of_wealth(x, consts.params.p)
        raise ExtrapolationError(
            f"wealth {x} beyond the stored trajectory (max {interp.x_max}); "
            f"power-law tail value a_inf*x**p = {fallback}",
            fallback_value=fallback,
        )
    x_eff = min(x, interp.x_max)
    s = interp.s_of_x(x_eff)
    y = math.exp(s)
    return y, float(interp.v_of_s(s)), float(interp.w_of_s(s))


def evaluate(x: float, solution: ValueSolution, on_out_of_range: str = "raise"):
    """(V, V_x, V_xx) at wealth x > 0.

    on_out_of_range: 'raise' propagates ExtrapolationError beyond the stored
    trajectory; 'asymptotic' substitutes the labelled power-law tail.
    """
    if x <= 0.0:
        raise ValueError(f"evaluate requires x > 0, got {x}")
    consts = solution.consts
    p = consts.params.p
    if x < solution.x_star * (1.0 - _BOUNDARY_SNAP):
        c = c_of_x(x, solution.umap)
        return value_on_U(c, solution.umap, consts)
    try:
        y, v, w = _dual_point(x, solution)
    except ExtrapolationError:
        if on_out_of_range != "asymptotic":
            raise
        a = consts.a_inf
        return (
            a * power_of_wealth(x, p),
            a * p * power_of_wealth(x, p) / x,
            a * p * (p - 1.0) * power_of_wealth(x, p) / (x * x),
        )
    vyy = dual_curvature(y, v, w, consts)
    return v - y * w, y, -1.0 / vyy


def value(x: float, solution: ValueSolution, on_out_of_range: str = "raise") -> float:
    """V(x); V(0) = 0 by continuity."""
    if x == 0.0:
        return 0.0
    return evaluate(x, solution, on_out_of_range)[0]


def derivative(x: float, solution: ValueSolution, on_out_of_range: str = "raise") -> float:
    return evaluate(x, solution, on_out_of_range)[1]


def second_derivative(x: float, solution: ValueSolution,
                      on_out_of_range: str = "raise") -> float:
    """V_xx(x).  At the exception point x_e this is the left limit; see
    second_derivative_is_one_sided."""
    return evaluate(x, solution, on_out_of_range)[2]


def second_derivative_is_one_sided(x: float, solution: ValueSolution) -> bool:
    """True when x is (numerically) the exception point x_e = ell/(r-k),
    where only the left second derivative is defined."""
    x_e = solution.consts.x_e
    return x_e is not None and abs(x - x_e) <= 1e-9 * x_e


def policy(x: float, solution: ValueSolution) -> PolicyPoint:
    """Optimal (c, pi) at wealth x >= 0."""
    return make_policy(solution)(x)


def hjb_residual(x: float, solution: ValueSolution) -> float:
    """Dynamic-programming equation residual at x, using the assembled
    (V, V_x, V_xx) and the candidate-optimal consumption
    c = min(V_x**(1/(p-1)), k*x + ell)."""
    consts = solution.consts
    params = consts.params
    p = params.p
    v, vx, vxx = evaluate(x, solution)
    c = min(vx ** (1.0 / (p - 1.0)), params.k * x + params.ell)
    return (params.beta * v
            + consts.theta * (1.0 - p) * vx * vx / vxx
            + (c - params.r * x) * vx
            - c ** p / p)


TABLE_HEADER = ("x", "V", "Vx", "Vxx", "c_star", "pi_star", "region")


def table_rows(solution: ValueSolution, xs, on_out_of_range: str = "raise"):
    """Rows (x, V, Vx, Vxx, c, pi, region) for the given wealth levels."""
    pol = make_policy(solution)
    rows = []
    for x in xs:
        x = float(x)
        v, vx, vxx = evaluate(x, solution, on_out_of_range)
        rows.append((x, v, vx, vxx, pol.consumption(x), pol.allocation(x),
                     region(x, solution)))
    return rows
