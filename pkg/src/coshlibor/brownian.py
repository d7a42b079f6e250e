"""Closed-form floorlet and put-swaption prices for a driftless Brownian driver.

With ``X = sigma B`` started at 0 every cosh martingale is even in ``x``, the
exercise interval is symmetric, ``(-kappa, kappa)``, and

    E[cosh(u X_t) 1{|X_t| <= kappa}]
        = exp(u^2 sigma^2 t / 2) (Phi(kappa/(sigma sqrt t) - u sigma sqrt t)
                                  - Phi(-kappa/(sigma sqrt t) - u sigma sqrt t)).
"""

from __future__ import annotations

import math

from scipy.special import ndtr

from .affine import BROWNIAN
from .errors import PreconditionError
from .model import CalibratedModel
from .unimodal import find_kappa_floorlet, find_kappa_swaption, swaption_weights


def _check(model: CalibratedModel) -> None:
    spec = model.spec
    if spec.kind != BROWNIAN or spec.x0 != 0.0 or spec.drift != 0.0 or not spec.sigma > 0:
        raise PreconditionError("closed forms need a driftless Brownian driver started at 0")


def _box_mass(a: float, b: float) -> float:
    """``Phi(b) - Phi(a)`` for ``a <= b`` without cancellation in the upper tail."""
    if a > 0.0:
        return float(ndtr(-a) - ndtr(-b))
    return float(ndtr(b) - ndtr(a))


def _cosh_box(model: CalibratedModel, u: float, t: float, kappa: float) -> float:
    """``exp(u^2 sigma^2 T / 2) (Phi(k/s - u s) - Phi(-k/s - u s))`` with ``s = sigma sqrt t``."""
    sigma = model.spec.sigma
    us = u * sigma
    s = math.sqrt(t)
    k = kappa / sigma
    return math.exp(0.5 * us * us * model.spec.horizon) * _box_mass(-k / s - us * s, k / s - us * s)


def cf_floorlet(model: CalibratedModel, k: int, strike: float) -> float:
    """Floorlet on ``F^k`` (fixing ``T_{k-1}``)."""
    _check(model)
    kp = find_kappa_floorlet(model, k, strike)
    if kp.degenerate:
        return 0.0
    kappa = 0.5 * (kp.kappa2 - kp.kappa1)
    t = model.tenor.date(k - 1)
    level = 1.0 + model.tenor.accrual(k) * strike
    p_T = model.curve.discounts[-1]
    return p_T * (level * _cosh_box(model, model.u_at(k), t, kappa)
                  - _cosh_box(model, model.u_at(k - 1), t, kappa))


def cf_put_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float) -> float:
    """Put swaption on the swap from ``T_alpha`` to ``T_beta``."""
    _check(model)
    kp = find_kappa_swaption(model, alpha, beta, strike)
    if kp.degenerate:
        return 0.0
    kappa = 0.5 * (kp.kappa2 - kp.kappa1)
    t = model.tenor.date(alpha)
    idx, weights = swaption_weights(model, alpha, beta, strike)
    total = -_cosh_box(model, model.u_at(alpha), t, kappa)
    for k, w in zip(idx, weights):
        total += w * _cosh_box(model, model.u_at(k), t, kappa)
    return model.curve.discounts[-1] * total
