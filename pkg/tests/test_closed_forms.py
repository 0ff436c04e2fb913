"""Closed-form values and policies against direct formula evaluation."""

import math

import numpy as np
import pytest

from conscap.closed_forms import (
    homogeneous_policy,
    homogeneous_value,
    merton_policy,
    merton_value,
    power_of_wealth,
)
from conscap.errors import IllPosedError, RegimeError
from conscap.market_model import ModelParams, derive

from conftest import draw_main_params

# 2/sqrt(0.1075), frozen from 40-digit evaluation
MERTON_V_P0_X1 = 6.099942813304187


def test_merton_value_p0(c0):
    assert merton_value(1.0, c0) == pytest.approx(MERTON_V_P0_X1, rel=1e-13)
    assert merton_value(0.0, c0) == 0.0
    # homogeneity of degree p: V(4) = 2 * V(1) for p = 1/2
    assert merton_value(4.0, c0) == pytest.approx(2 * MERTON_V_P0_X1, rel=1e-13)


def test_merton_value_ill_posed(p0):
    theta = p0.mu ** 2 / (2 * p0.sigma ** 2 * (1 - p0.p))
    consts = derive(ModelParams(r=p0.r, mu=p0.mu, sigma=p0.sigma,
                                beta=p0.p * (theta + p0.r), p=p0.p,
                                k=p0.k, ell=p0.ell))
    with pytest.raises(IllPosedError):
        merton_value(1.0, consts)


def test_merton_policy(c0, c1):
    pt = merton_policy(10.0, c0)
    assert pt.c == pytest.approx(1.075, rel=1e-14)
    assert pt.pi == pytest.approx(25.0, rel=1e-14)
    zero = merton_policy(0.0, c0)
    assert zero.c == 0.0 and zero.pi == 0.0
    pt1 = merton_policy(10.0, c1)
    assert pt1.c == pytest.approx(0.775, rel=1e-14)
    assert pt1.pi == pytest.approx(25.0, rel=1e-14)


def _homogeneous_consts(p0, k=None):
    k = p0.k if k is None else k
    return derive(ModelParams(r=p0.r, mu=p0.mu, sigma=p0.sigma, beta=p0.beta,
                              p=p0.p, k=k, ell=0.0))


def test_homogeneous_value_p0(p0):
    consts = _homogeneous_consts(p0)
    # k**p / (p*(kappa(1-p)+kp)) with k = 0.05: frozen 40-digit value
    assert homogeneous_value(1.0, consts) == pytest.approx(5.678902799999466, rel=1e-13)
    assert homogeneous_value(0.0, consts) == 0.0


def test_homogeneous_equals_merton_when_slope_large(p0):
    consts = _homogeneous_consts(p0, k=0.5)  # k > kappa
    for x in (0.5, 1.0, 7.3):
        assert homogeneous_value(x, consts) == pytest.approx(
            merton_value(x, consts), rel=1e-14)


def test_homogeneous_policy(p0):
    consts = _homogeneous_consts(p0)
    pt = homogeneous_policy(2.0, consts)
    assert pt.c == pytest.approx(0.1, rel=1e-14)          # min(kappa,k)*x = 0.05*2
    assert pt.pi == pytest.approx(5.0, rel=1e-14)
    with pytest.raises(RegimeError):
        homogeneous_value(1.0, derive(p0))  # ell > 0


def test_homogeneous_below_merton(p0):
    consts = _homogeneous_consts(p0)
    for x in np.logspace(-2, 3, 40):
        assert homogeneous_value(x, consts) < merton_value(x, consts)


def test_scaling_property(p0):
    consts = _homogeneous_consts(p0)
    full = derive(p0)
    rng = np.random.default_rng(5)
    for _ in range(30):
        x = rng.uniform(0.01, 50.0)
        s = rng.uniform(0.1, 10.0)
        for f, c in ((merton_value, full), (homogeneous_value, consts)):
            assert f(s * x, c) == pytest.approx(s ** p0.p * f(x, c), rel=1e-12)


def test_homogeneous_value_monotone_and_concave(p0):
    consts = _homogeneous_consts(p0)
    xs = np.linspace(0.1, 20.0, 200)
    vals = np.array([homogeneous_value(x, consts) for x in xs])
    dv = np.diff(vals)
    assert np.all(dv > 0)
    assert np.all(np.diff(dv) < 0)


def test_closed_form_regression_random_draws():
    """1000 random (params, x) draws reproduce the formulas to 1e-12."""
    rng = np.random.default_rng(42)
    draws = 0
    while draws < 1000:
        params = draw_main_params(rng)
        consts = derive(params)
        x = rng.uniform(1e-3, 1e3)
        p = params.p
        expected_merton = consts.kappa ** (p - 1) * x ** p / p
        assert merton_value(x, consts) == pytest.approx(expected_merton, rel=1e-12)
        hom = derive(ModelParams(r=params.r, mu=params.mu, sigma=params.sigma,
                                 beta=params.beta, p=params.p, k=params.k, ell=0.0))
        kmin = min(hom.kappa, params.k)
        expected_hom = kmin ** p / (p * (hom.kappa * (1 - p) + kmin * p)) * x ** p
        assert homogeneous_value(x, hom) == pytest.approx(expected_hom, rel=1e-12)
        draws += 1


def test_power_of_wealth_guards():
    assert power_of_wealth(0.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        power_of_wealth(-1.0, 0.5)
    assert power_of_wealth(2.0, 0.5) == pytest.approx(math.sqrt(2.0), rel=1e-15)
