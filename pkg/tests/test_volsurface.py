import math

import numpy as np
import pytest
from scipy.special import ndtr

from coshlibor.fourier import annuity, forward_swap_rate, price_caplet, price_payer_swaption, price_put_swaption
from coshlibor.volsurface import (NO_SOLUTION, OK, ZERO_TIME_VALUE, VolSurfaceGrid, black76_price,
                                  build_caplet_surface, build_swaption_atm_grid, implied_vol)


def test_black_zero_vol_is_intrinsic():
    assert black76_price(0.04, 0.03, 2.0, 0.0, 0.9) == pytest.approx(0.9 * 0.01, abs=1e-16)
    assert black76_price(0.04, 0.03, 2.0, 0.0, 0.9, call=False) == 0.0


def test_black_atm_identity():
    F, T, vol, A = 0.035, 3.0, 0.31, 1.7
    assert black76_price(F, F, T, vol, A) == pytest.approx(A * F * (2 * ndtr(0.5 * vol * math.sqrt(T)) - 1),
                                                           rel=1e-13)


def test_black_increasing_in_vol():
    vols = np.linspace(0.01, 3, 300)
    prices = [black76_price(0.03, 0.05, 4.0, v, 1.0) for v in vols]
    assert np.all(np.diff(prices) > 0)


def test_black_domain():
    with pytest.raises(ValueError):
        black76_price(0.0, 0.03, 1.0, 0.2, 1.0)


@pytest.mark.parametrize("call", [True, False])
@pytest.mark.parametrize("strike", [0.01, 0.035, 0.09])
def test_implied_vol_round_trip(call, strike):
    p = black76_price(0.035, strike, 2.5, 0.27, 0.8, call)
    vol, flag = implied_vol(p, 0.035, strike, 2.5, 0.8, call)
    assert flag == OK and vol == pytest.approx(0.27, abs=1e-8)


def test_implied_vol_flags():
    intrinsic = black76_price(0.04, 0.03, 1.0, 0.0, 1.0)
    assert implied_vol(intrinsic, 0.04, 0.03, 1.0, 1.0) == (0.0, ZERO_TIME_VALUE)
    vol, flag = implied_vol(1.01 * 0.04, 0.04, 0.03, 1.0, 1.0)
    assert flag == NO_SOLUTION and math.isnan(vol)


def test_grid_shape_checks():
    with pytest.raises(ValueError):
        VolSurfaceGrid((1.0,), (0.1, 0.2), np.zeros((2, 2)), (("ok", "ok"),))


def test_caplet_surface(fig1_model):
    m = fig1_model
    mats, strikes = (1.0, 2.5), (0.05, 0.02, 0.035)
    grid = build_caplet_surface(m, mats, strikes)
    assert grid.vols.shape == (2, 3) and grid.columns == (0.02, 0.035, 0.05)
    again = build_caplet_surface(m, mats, sorted(strikes))
    assert np.array_equal(grid.vols, again.vols) and grid.flags == again.flags
    for i, t in enumerate(mats):
        k = m.tenor.index_of(t) + 1
        ann = m.tenor.accrual(k) * m.discount(k)
        fwd = (m.discount(k - 1) / m.discount(k) - 1) / m.tenor.accrual(k)
        for j, K in enumerate(grid.columns):
            assert grid.flags[i][j] == OK
            p = price_caplet(m, k, K).price
            assert abs(black76_price(fwd, K, t, grid.vols[i, j], ann) - p) <= 1e-10 * ann


def test_swaption_grid_and_single_period(fig1_model):
    m = fig1_model
    grid = build_swaption_atm_grid(m, (2.0, 3.0), (0.5, 2.0, 8.5))
    assert grid.flags[0][:2] == (OK, OK) and grid.flags[1][2] == "not-available"
    cap = build_caplet_surface(m, (2.0,), (forward_swap_rate(m, 4, 5),))
    assert grid.vols[0, 0] == pytest.approx(cap.vols[0, 0], abs=1e-6)
    # ATM: payer and receiver coincide, so either feeds the same vol
    S = forward_swap_rate(m, 6, 10)
    pay, rec = price_payer_swaption(m, 6, 10, S).price, price_put_swaption(m, 6, 10, S).price
    assert pay == pytest.approx(rec, abs=1e-10)
    assert abs(black76_price(S, S, 3.0, grid.vols[1, 1], annuity(m, 6, 10)) - pay) <= 1e-10 * annuity(m, 6, 10)
