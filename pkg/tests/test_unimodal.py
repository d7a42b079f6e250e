import math

import numpy as np
import pytest

from coshlibor.affine import AffineProcessSpec, exponents
from coshlibor.errors import NumericalError, PreconditionError
from coshlibor.fourier import forward_swap_rate
from coshlibor.model import forward_rate_lower_bound, martingale_value
from coshlibor.unimodal import (bisect_root, find_extremum, find_kappa_floorlet,
                                find_kappa_swaption, cosh_ratio_log)

from conftest import random_instance


def test_quadratic():
    assert find_extremum(lambda x: -(x - 3.0) ** 2, 0.0) == pytest.approx(3.0, abs=1e-9)
    assert find_extremum(lambda x: (x + 7.5) ** 2, 40.0, maximize=False) == pytest.approx(-7.5, abs=1e-8)


def test_bracket_limit():
    with pytest.raises(NumericalError):
        find_extremum(lambda x: x, 0.0)


def test_bisect_root():
    r = bisect_root(lambda x: x ** 3 - 2.0, 0.0, 2.0)
    assert r == pytest.approx(2 ** (1 / 3), abs=1e-13)


def test_ratio_unimodal_on_random_instances():
    rng = np.random.default_rng(12345)
    for _ in range(100):
        spec, t, u0, ui, cs = random_instance(rng)
        log_g, slope = cosh_ratio_log(spec, t, u0, ui, cs)
        xi = find_extremum(log_g, spec.x0, derivative=slope)
        span = 10.0 * (1.0 + abs(xi))
        xs = np.linspace(xi - span, xi + span, 10_001)
        vals = np.array([log_g(x) for x in xs])
        d = np.diff(vals)
        tol = 1e-12 * np.abs(vals[1:]).max()
        left, right = xs[1:] <= xi, xs[:-1] >= xi
        assert np.all(d[left] >= -tol) and np.all(d[right] <= tol)
        assert log_g(xi) >= vals.max() - 1e-12
        # tails go to zero
        far = 1000.0 * (1 + abs(xi))
        assert log_g(xi - far) < log_g(xi) - 1 and log_g(xi + far) < log_g(xi) - 1

        # appendix tail-slope bound |a_i| < b_0 - b_i
        tau = spec.horizon - t
        (_, p0) = exponents(spec, tau, np.array([u0, -u0]))
        b0 = 0.5 * (p0[0] - p0[1])
        e0 = 0.5 * (p0[0] + p0[1])
        for u in ui:
            (_, p) = exponents(spec, tau, np.array([u, -u]))
            a, b = 0.5 * (p[0] + p[1]) - e0, 0.5 * (p[0] - p[1])
            assert abs(a) < b0 - b


def test_cosh_ratio_agrees_with_direct_ratio():
    spec = AffineProcessSpec.jump_ou(lam=0.02, alpha_plus=12, alpha_minus=10, beta_plus=50,
                                     beta_minus=5, sigma=0.3, theta=0.5, x0=0.7)
    log_g, _ = cosh_ratio_log(spec, 2.0, 1.2, [0.8, 0.1], [0.5, 2.0])
    for x in (-3.0, 0.0, 4.0):
        direct = (0.5 * martingale_value(spec, 0.8, 2.0, x) + 2.0 * martingale_value(spec, 0.1, 2.0, x)) \
            / martingale_value(spec, 1.2, 2.0, x)
        assert math.exp(log_g(x)) == pytest.approx(direct, rel=1e-13)


def test_fig1_grid_monotone_around_extremum(fig1_model):
    m = fig1_model
    spec = m.spec
    log_g, slope = cosh_ratio_log(spec, m.tenor.date(4), m.u_at(4), [m.u_at(5)], [1.0])
    xi = find_extremum(log_g, spec.x0, derivative=slope)
    left = np.array([log_g(x) for x in np.linspace(xi - 10, xi, 10_000)])
    right = np.array([log_g(x) for x in np.linspace(xi, xi + 10, 10_000)])
    assert np.all(np.diff(left) >= -1e-15) and np.all(np.diff(right) <= 1e-15)


def test_brownian_symmetry(brownian_model):
    kp = find_kappa_floorlet(brownian_model, 5, 0.035)
    assert kp.xi == pytest.approx(0.0, abs=1e-10)
    assert kp.kappa1 == pytest.approx(-kp.kappa2, abs=1e-12)


def _floor_residual(model, k, strike, x):
    t = model.tenor.date(k - 1)
    ratio = martingale_value(model.spec, model.u_at(k - 1), t, x) / martingale_value(model.spec, model.u_at(k), t, x)
    return 1 + model.tenor.accrual(k) * strike - ratio


def test_floorlet_kappa_residuals(fig1_model):
    m = fig1_model
    for k in (2, 6, 11):
        fwd = (m.discount(k - 1) / m.discount(k) - 1) / m.tenor.accrual(k)
        kp = find_kappa_floorlet(m, k, fwd)
        assert not kp.degenerate and kp.kappa1 < kp.xi < kp.kappa2
        for x in (kp.kappa1, kp.kappa2):
            assert abs(_floor_residual(m, k, fwd, x)) <= 1e-12


def test_strike_below_floor_is_degenerate(fig1_model):
    bound = forward_rate_lower_bound(fig1_model, 2)
    kp = find_kappa_floorlet(fig1_model, 2, 0.9 * bound)
    assert kp.degenerate and kp.kappa1 == kp.kappa2 == kp.xi
    assert not find_kappa_floorlet(fig1_model, 2, 1.1 * bound).degenerate


def test_swaption_kappa(fig1_model):
    m = fig1_model
    assert find_kappa_swaption(m, 4, 10, 0.0).degenerate
    # single period equals the floorlet region
    a, K = 6, 0.04
    s = find_kappa_swaption(m, a, a + 1, K)
    f = find_kappa_floorlet(m, a + 1, K)
    assert s.kappa1 == pytest.approx(f.kappa1, abs=1e-11)
    assert s.kappa2 == pytest.approx(f.kappa2, abs=1e-11)
    # ATM grid point of the swaption surface
    alpha, beta = 4, 14
    atm = forward_swap_rate(m, alpha, beta)
    kp = find_kappa_swaption(m, alpha, beta, atm)
    assert kp.kappa1 < kp.xi < kp.kappa2
    t = m.tenor.date(alpha)
    for x in (kp.kappa1, kp.kappa2):
        lhs = martingale_value(m.spec, m.u_at(beta), t, x) + atm * sum(
            m.tenor.accrual(k) * martingale_value(m.spec, m.u_at(k), t, x) for k in range(alpha + 1, beta + 1))
        assert abs(lhs / martingale_value(m.spec, m.u_at(alpha), t, x) - 1) <= 1e-12


def test_non_strict_u_is_rejected(fig1_model):
    from dataclasses import replace
    us = list(fig1_model.u)
    us[3] = us[2]
    bad = replace(fig1_model, u=tuple(us))
    with pytest.raises(PreconditionError):
        find_kappa_floorlet(bad, 4, 0.03)
