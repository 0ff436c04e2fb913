"""Consumption-to-wealth map: coefficients, inverse, and value formulas."""

import numpy as np
import pytest

from conscap.errors import BracketError
from conscap.market_model import free_boundary_bracket
from conscap.unconstrained_region import (
    build_umap,
    c_of_x,
    value_on_U,
    x_of_c,
    xprime_of_c,
)

# ((k-kappa)*10 + 1) / (kappa * 1.5**lambda_plus), frozen from 40-digit evaluation
B_P0_XHAT10 = 1.9393404445591923
X_P0_XHAT10_C075 = 5.806750620634243


@pytest.fixture()
def umap0(c0):
    return build_umap(10.0, c0)


def test_coefficients_p0(umap0):
    assert umap0.c_star == pytest.approx(1.5, rel=1e-14)
    assert umap0.B == pytest.approx(B_P0_XHAT10, rel=1e-13)
    assert umap0.B > 0


def test_boundary_identity(umap0):
    assert x_of_c(umap0.c_star, umap0) == pytest.approx(10.0, rel=1e-12)


def test_merton_like_at_upper_bracket_end(c0):
    _, hi = free_boundary_bracket(c0)
    umap = build_umap(hi, c0)
    assert umap.B == pytest.approx(0.0, abs=1e-13)
    for c in (0.1, 0.5, 1.0):
        assert x_of_c(c, umap) == pytest.approx(c / c0.kappa, rel=1e-12)


def test_positive_coefficient_at_lower_bracket_end(c0):
    lo, _ = free_boundary_bracket(c0)
    assert build_umap(lo, c0).B > 0


def test_candidate_outside_bracket_rejected(c0):
    lo, hi = free_boundary_bracket(c0)
    with pytest.raises(BracketError):
        build_umap(hi * 1.01, c0)
    with pytest.raises(BracketError):
        build_umap(lo * 0.99, c0)


def test_x_of_c_formula_p0(umap0):
    assert x_of_c(0.75, umap0) == pytest.approx(X_P0_XHAT10_C075, rel=1e-13)


def test_x_of_c_vanishes_at_origin(umap0):
    assert x_of_c(1e-12, umap0) == pytest.approx(0.0, abs=1e-11)
    for c in (1e-8, 1e-4):
        assert 0 < x_of_c(c, umap0) < c / umap0.kappa


def test_x_of_c_domain(umap0):
    with pytest.raises(ValueError):
        x_of_c(0.0, umap0)
    with pytest.raises(ValueError):
        x_of_c(umap0.c_star * 1.001, umap0)


def test_inverse_roundtrip(umap0):
    for x in np.linspace(0.05, 10.0, 50):
        c = c_of_x(x, umap0)
        assert abs(x_of_c(c, umap0) - x) <= 1e-10 * max(1.0, x)
        assert umap0.kappa * x <= c <= umap0.k * x + umap0.ell


def test_inverse_at_boundary(umap0):
    assert c_of_x(10.0, umap0) == pytest.approx(umap0.c_star, rel=1e-12)


def test_inverse_midpoint_bounds(umap0):
    c = c_of_x(5.0, umap0)
    assert 0.1075 * 5.0 <= c <= 0.05 * 5.0 + 1.0


def test_consumption_to_wealth_ratio_at_origin(umap0, c0):
    # leading term of the map gives c/x -> kappa as x -> 0+
    x = 1e-6
    assert c_of_x(x, umap0) / x == pytest.approx(c0.kappa, rel=1e-5)


def test_map_increasing_and_below_merton_ray(umap0):
    cs = np.linspace(1e-4, umap0.c_star, 200)
    xs = [x_of_c(c, umap0) for c in cs]
    assert np.all(np.diff(xs) > 0)
    assert np.all([xprime_of_c(c, umap0) > 0 for c in cs])
    assert np.all([x <= c / umap0.kappa for c, x in zip(cs, xs)])


def test_value_on_U_satisfies_region_ode(umap0, c0):
    """The defining second-order ODE holds to 1e-9 at 100 sampled points."""
    params = c0.params
    p = params.p
    for c in np.linspace(0.02, umap0.c_star, 100):
        v, vx, vxx = value_on_U(c, umap0, c0)
        residual = (params.beta * v
                    + c0.theta * (1 - p) * vx * vx / vxx
                    - params.r * x_of_c(c, umap0) * vx
                    + (1 - 1 / p) * vx ** (p / (p - 1)))
        assert abs(residual) <= 1e-9 * max(1.0, params.beta * abs(v))


def test_value_on_U_concave(umap0, c0):
    for c in np.linspace(0.02, umap0.c_star, 100):
        _, _, vxx = value_on_U(c, umap0, c0)
        assert vxx < 0


def test_marginal_value_matches_cap_at_boundary(umap0, c0):
    p = c0.params.p
    _, vx, _ = value_on_U(umap0.c_star, umap0, c0)
    assert vx ** (1 / (p - 1)) == pytest.approx(umap0.k * 10.0 + umap0.ell, rel=1e-12)


def test_reduces_to_merton_when_B_zero(c0):
    from conscap.closed_forms import merton_value
    _, hi = free_boundary_bracket(c0)
    umap = build_umap(hi, c0)
    for c in (0.2, 0.8, 1.4):
        v, _, _ = value_on_U(c, umap, c0)
        assert v == pytest.approx(merton_value(x_of_c(c, umap), c0), rel=1e-12)
