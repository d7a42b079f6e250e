import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from coshlibor.affine import mgf_conditional
from coshlibor.brownian import cf_floorlet, cf_put_swaption
from coshlibor.fourier import (_expectation, adaptive_inversion, annuity, choose_R, fhat_floorlet,
                               h_function, integrate_inversion, payoff_terms, pole_images,
                               price_caplet, price_floorlet, price_payer_swaption,
                               price_put_swaption, singular_part)
from coshlibor.model import martingale_value
from coshlibor.unimodal import KappaPair, find_kappa_floorlet


def test_h_function_is_integral_of_derivative(fig1_model):
    m = fig1_model
    t, u = 2.0, m.u_at(5)
    kp = KappaPair(-1.5, 2.5, 0.5, False)
    h = 1e-6
    dM = lambda x: (martingale_value(m.spec, u, t, x + h) - martingale_value(m.spec, u, t, x - h)) / (2 * h)  # noqa: E731
    for z in (0.4, -1.7):
        ref = integrate.quad(lambda x: math.exp(z * x) * dM(x), kp.kappa1, kp.kappa2, epsabs=0, epsrel=1e-11)[0]
        assert complex(h_function(m, t, z, u, kp)).real == pytest.approx(ref, rel=1e-8)


def test_fhat_matches_numeric_transform(fig1_model):
    m = fig1_model
    k, K = 6, 0.04
    kp = find_kappa_floorlet(m, k, K)
    coef, expo = payoff_terms(m, m.tenor.date(k - 1), [k, k - 1], [1 + m.tenor.accrual(k) * K, -1.0])
    f = lambda x: float(np.sum(coef * np.exp(expo * x)))  # noqa: E731
    for zeta in (0.0, 3.0 + 1.0j, 17.5 + 0.5j):
        g = lambda x: np.exp(-1j * zeta * x) * f(x)  # noqa: E731
        re = integrate.quad(lambda x: g(x).real, kp.kappa1, kp.kappa2, epsabs=0, epsrel=1e-12, limit=400)[0]
        im = integrate.quad(lambda x: g(x).imag, kp.kappa1, kp.kappa2, epsabs=0, epsrel=1e-12, limit=400)[0]
        got = complex(fhat_floorlet(m, k, K, zeta, kp))
        ref = complex(re, im)
        assert abs(got - ref) <= 1e-9 * max(abs(ref), 1e-3)


@pytest.mark.parametrize("name", ["fig1_model", "fig2_model"])
def test_transform_decays_like_inverse_square(name, request):
    # continuous payoff vanishing at kappa1, kappa2: |fhat| envelope ~ w^-2
    m = request.getfixturevalue(name)
    k, K = 6, 0.035
    kp = find_kappa_floorlet(m, k, K)
    R = choose_R(m, k - 1)
    edges = np.logspace(2, 4, 21)
    env = []
    for a, b in zip(edges[:-1], edges[1:]):
        w = np.linspace(a, b, 4000)
        env.append(np.max(np.abs(fhat_floorlet(m, k, K, w - 1j * R, kp))))
    mid = np.sqrt(edges[:-1] * edges[1:])
    slope = np.polyfit(np.log(mid), np.log(env), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def test_gaussian_box_indicator():
    # N(0,1) probability of (-1, 2) from the inversion formula
    R = -0.5
    a, b = -1.0, 2.0

    def mgf(w):
        z = R + 1j * w
        return np.exp(0.5 * z * z)

    def box(w):
        s = -(1j * (w - 1j * R))
        return (np.exp(s * b) - np.exp(s * a)) / s

    from scipy.special import ndtr
    got = integrate_inversion(mgf, box, panel_width=0.5)
    assert got == pytest.approx(ndtr(b) - ndtr(a), abs=1e-10)


def test_zero_integrand():
    info = adaptive_inversion(lambda w: np.zeros_like(w))
    assert info.value == 0.0


@pytest.mark.parametrize("name", ["fig1_model", "fig2_model"])
def test_self_convergence(name, request):
    m = request.getfixturevalue(name)
    a = price_floorlet(m, 8, 0.035).price
    b = price_floorlet(m, 8, 0.035, rtol=1e-12).price
    assert abs(a - b) <= 1e-9 * abs(b)


@pytest.mark.parametrize("name", ["fig1_model", "fig2_model"])
def test_dampening_invariance(name, request):
    m = request.getfixturevalue(name)
    for k, K in ((3, 0.02), (9, 0.05)):
        r1 = choose_R(m, k - 1)
        r2 = choose_R(m, k - 1, start=-2.5)
        assert abs(r1 - r2) > 1
        p1 = price_floorlet(m, k, K, R=r1).price
        p2 = price_floorlet(m, k, K, R=r2).price
        assert abs(p1 - p2) <= 1e-9 * max(abs(p1), 1e-12)
    q1 = price_put_swaption(m, 4, 12, 0.035, R=choose_R(m, 4)).price
    q2 = price_put_swaption(m, 4, 12, 0.035, R=choose_R(m, 4, start=-2.5)).price
    assert abs(q1 - q2) <= 1e-9 * q1


@pytest.mark.parametrize("name", ["fig1_model", "fig2_model"])
def test_large_strike_limit(name, request):
    m = request.getfixturevalue(name)
    k, K = 5, 10.0
    level = 1 + m.tenor.accrual(k) * K
    assert price_floorlet(m, k, K).price == pytest.approx(level * m.discount(k) - m.discount(k - 1), abs=1e-6)
    assert abs(price_caplet(m, k, K).price) <= 1e-6


def test_choose_R_brownian_and_collision(brownian_model):
    assert choose_R(brownian_model, 3) == -1.0
    us = list(brownian_model.u)
    us[2] = 1.0005
    crowded = replace(brownian_model, u=tuple(us))
    R = choose_R(crowded, 3)
    assert np.min(np.abs(pole_images(crowded, crowded.tenor.date(3)) - R)) >= 1e-3 - 1e-15


def test_parity_and_degenerate_cases(fig1_model):
    m = fig1_model
    for k, K in ((2, 0.02), (7, 0.05)):
        cpl, flt = price_caplet(m, k, K).price, price_floorlet(m, k, K).price
        assert cpl - flt == pytest.approx(m.discount(k - 1) - (1 + m.tenor.accrual(k) * K) * m.discount(k),
                                          abs=1e-10)
    pay, rec = price_payer_swaption(m, 4, 12, 0.04).price, price_put_swaption(m, 4, 12, 0.04).price
    assert pay - rec == pytest.approx(m.discount(4) - m.discount(12) - 0.04 * annuity(m, 4, 12), abs=1e-10)
    assert price_put_swaption(m, 4, 12, 0.0).price == 0.0
    assert price_floorlet(m, 3, 0.0).price == 0.0


@pytest.mark.parametrize("name", ["fig1_model", "fig2_model", "brownian_model"])
def test_single_period_swaption_is_floorlet(name, request):
    m = request.getfixturevalue(name)
    for a, K in ((1, 0.03), (5, 0.045)):
        assert price_put_swaption(m, a, a + 1, K).price == pytest.approx(
            price_floorlet(m, a + 1, K).price, abs=1e-9)


def test_brownian_closed_form(brownian_model):
    m = brownian_model
    for K in (0.02, 0.035, 0.05, 0.07):
        for k in (2, 6, 10):
            assert price_floorlet(m, k, K).price == pytest.approx(cf_floorlet(m, k, K), rel=1e-8)
        assert price_put_swaption(m, 1, 5, K).price == pytest.approx(cf_put_swaption(m, 1, 5, K), rel=1e-8)


def test_singular_part_mass(fig2_model):
    # over a wide box the singular part carries p0 (1 + (beta+ + beta-) q)
    spec = fig2_model.spec
    t = 3.0
    val, p0, loc = singular_part(spec, t, np.array([1.0]), np.array([0.0]), -60.0, 60.0)
    q = math.expm1(spec.lam * t)
    assert val == pytest.approx(p0 * (1 + (spec.beta_plus + spec.beta_minus) * q), rel=1e-13)
    assert loc == pytest.approx(spec.x0 * math.exp(-spec.lam * t), rel=1e-15)


@pytest.mark.parametrize("t", [0.5, 3.0, 9.5])
def test_expectation_recovers_mgf(fig2_model, t):
    # wide box, exponential payoff: the answer is the mgf itself
    m = fig2_model
    coef, expo = np.array([1.0, 0.5]), np.array([0.3, -0.2])
    kp = KappaPair(-60.0, 60.0, 0.0, False)
    R = choose_R(m, m.tenor.index_of(t))
    got, _ = _expectation(m, t, coef, expo, kp, R, 1e-12)
    ref = sum(c * float(mgf_conditional(m.spec, t, v, m.spec.x0).real) for c, v in zip(coef, expo))
    assert got == pytest.approx(ref, rel=1e-9)
