"""Black-76 pricing, implied volatility and the caplet/swaption vol surfaces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .fourier import annuity, forward_swap_rate, price_caplet, price_payer_swaption
from .model import CalibratedModel

OK = "ok"
ZERO_TIME_VALUE = "zero-time-value"
NO_SOLUTION = "no-solution"
NOT_AVAILABLE = "not-available"

VOL_CAP = 10.0
PRICE_TOL = 1e-12


def black76_price(forward: float, strike: float, expiry: float, vol: float, annuity: float,
                  call: bool = True) -> float:
    """``annuity * (F N(d1) - K N(d2))`` for calls, puts by parity."""
    if not (forward > 0 and strike > 0 and expiry > 0 and vol >= 0 and annuity > 0):
        raise ValueError("black76_price needs forward, strike, expiry, annuity > 0 and vol >= 0")
    if vol == 0.0:
        intrinsic = forward - strike if call else strike - forward
        return annuity * max(intrinsic, 0.0)
    sd = vol * math.sqrt(expiry)
    d1 = math.log(forward / strike) / sd + 0.5 * sd
    d2 = d1 - sd
    if call:
        return annuity * (forward * ndtr(d1) - strike * ndtr(d2))
    return annuity * (strike * ndtr(-d2) - forward * ndtr(-d1))


def implied_vol(price: float, forward: float, strike: float, expiry: float, annuity: float,
                call: bool = True) -> tuple[float, str]:
    """``(vol, flag)`` by bisection on ``[0, 10]``.

    A price at or below intrinsic value gives ``(0, "zero-time-value")``; a
    price no vol up to the cap can reach gives ``(nan, "no-solution")``.
    """
    if price < 0:
        raise ValueError("price must be nonnegative")
    intrinsic = black76_price(forward, strike, expiry, 0.0, annuity, call)
    cap = annuity * (forward if call else strike)
    tol = PRICE_TOL * annuity
    if price <= intrinsic + tol:
        return 0.0, ZERO_TIME_VALUE
    if price >= cap or black76_price(forward, strike, expiry, VOL_CAP, annuity, call) < price - tol:
        return math.nan, NO_SOLUTION
    lo, hi = 0.0, VOL_CAP
    while True:
        mid = 0.5 * (lo + hi)
        diff = black76_price(forward, strike, expiry, mid, annuity, call) - price
        if abs(diff) <= tol or mid <= lo or mid >= hi:
            return mid, OK
        if diff < 0:
            lo = mid
        else:
            hi = mid


@dataclass(frozen=True)
class VolSurfaceGrid:
    """Implied vols on ``maturities x columns``; columns are strikes or swap tenors."""

    maturities: tuple[float, ...]
    columns: tuple[float, ...]
    vols: np.ndarray
    flags: tuple[tuple[str, ...], ...]
    column_kind: str = "strike"

    def __post_init__(self):
        if self.vols.shape != (len(self.maturities), len(self.columns)):
            raise ValueError("vol matrix does not match the axes")
        if len(self.flags) != len(self.maturities) or any(len(r) != len(self.columns) for r in self.flags):
            raise ValueError("flag matrix does not match the axes")

    @property
    def all_ok(self) -> bool:
        return all(f == OK for row in self.flags for f in row)


def build_caplet_surface(model: CalibratedModel, maturities, strikes) -> VolSurfaceGrid:
    """Caplet vols; maturity ``T_{k-1}`` is the fixing date of ``F^k``.

    The Black annuity is ``Delta_k P(0, T_k)`` and the forward comes from the curve.
    """
    maturities = tuple(float(m) for m in maturities)
    strikes = tuple(sorted(float(s) for s in strikes))
    vols = np.empty((len(maturities), len(strikes)))
    flags = []
    for i, t in enumerate(maturities):
        k = model.tenor.index_of(t) + 1
        delta = model.tenor.accrual(k)
        ann = delta * model.discount(k)
        fwd = (model.discount(k - 1) / model.discount(k) - 1.0) / delta
        row = []
        for j, strike in enumerate(strikes):
            price = price_caplet(model, k, strike).price
            vols[i, j], flag = implied_vol(max(price, 0.0), fwd, strike, t, ann, call=True)
            row.append(flag)
        flags.append(tuple(row))
    return VolSurfaceGrid(maturities, strikes, vols, tuple(flags), "strike")


def build_swaption_atm_grid(model: CalibratedModel, expiries, tenors) -> VolSurfaceGrid:
    """ATM payer swaption vols; cells whose swap ends after the horizon are flagged not-available."""
    expiries = tuple(float(e) for e in expiries)
    tenors = tuple(sorted(float(L) for L in tenors))
    vols = np.full((len(expiries), len(tenors)), math.nan)
    flags = []
    for i, e in enumerate(expiries):
        alpha = model.tenor.index_of(e)
        row = []
        for j, length in enumerate(tenors):
            end = e + length
            if end > model.tenor.horizon + 1e-9:
                row.append(NOT_AVAILABLE)
                continue
            beta = model.tenor.index_of(end)
            strike = forward_swap_rate(model, alpha, beta)
            ann = annuity(model, alpha, beta)
            price = price_payer_swaption(model, alpha, beta, strike).price
            vols[i, j], flag = implied_vol(max(price, 0.0), strike, strike, e, ann, call=True)
            row.append(flag)
        flags.append(tuple(row))
    return VolSurfaceGrid(expiries, tenors, vols, tuple(flags), "tenor")
