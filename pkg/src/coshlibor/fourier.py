"""Floorlet and put-swaption prices by one-dimensional Fourier inversion.

For a payoff ``f(x) = sum_j C_j exp(v_j x) 1{kappa1 < x < kappa2}`` that vanishes
at both ends of its support,

    E[f(X_t) | X_0 = x0] = (1/pi) int_0^inf Re(M(R + i w) fhat(w - i R)) dw

with ``M`` the conditional moment generating function and

    fhat(z) = (1/(iz)) sum_j C_j v_j / (v_j - iz) (exp((v_j - iz) kappa2) - exp((v_j - iz) kappa1)).

Floorlets and put swaptions are of this form under the terminal measure; caplets
and payer swaptions follow by parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize

from . import _kernels
from .affine import domain_real, exponents, mean, point_mass
from .errors import CoshLiborError, ConfigError, IntegrationError, PreconditionError
from .model import CalibratedModel
from .unimodal import (KappaPair, find_kappa_floorlet, find_kappa_swaption,
                       swaption_weights)

POLE_DISTANCE = 1e-3
SERIES_CUTOFF = 1e-8
DEFAULT_RTOL = 1e-10
TRUNCATION_RTOL = 1e-12
MAX_PANELS = 4_000_000
MAX_PANEL_GROWTH = 16.0
DIRECT_ATOL = 1e-13
PARITY_CANCEL = 1e-3

# Gauss-Kronrod 7-15 nodes on [-1, 1] (QUADPACK qk15)
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class PricingResult:
    """Price per unit notional with the numerical diagnostics behind it."""

    price: float
    kappa: KappaPair
    dampening: float
    integral_error_estimate: float
    truncation_bound: float


class QuadratureInfo(NamedTuple):
    value: float
    error: float
    truncation_bound: float
    upper_limit: float
    n_evals: int


# ---------------------------------------------------------------------------
# transforms


def h_function(model: CalibratedModel, t: float, z, u: float, kappa: KappaPair):
    """Transform building block for one cosh martingale ``M_t^u`` on ``(kappa1, kappa2)``.

    Sum over ``v = psi_{T-t}(+-u)`` of
    ``exp(phi(v)) v / (2 (z + v)) (exp((z + v) kappa2) - exp((z + v) kappa1))``.
    """
    z = np.asarray(z, dtype=complex)
    if kappa.degenerate or kappa.kappa1 == kappa.kappa2:
        return np.zeros_like(z)
    tau = model.spec.horizon - t
    ph, ps = exponents(model.spec, tau, np.array([u, -u], dtype=float))
    width = kappa.kappa2 - kappa.kappa1
    out = np.zeros_like(z)
    for a, v in zip(ph, ps):
        if v == 0.0:
            continue
        s = z + v
        small = np.abs(s) < SERIES_CUTOFF
        safe = np.where(small, 1.0, s)
        sd = s * width
        quot = np.where(small, width * (1.0 + 0.5 * sd + sd * sd / 6.0), np.expm1(sd) / safe)
        out = out + math.exp(a) * v / 2.0 * np.exp(s * kappa.kappa1) * quot
    return out


def payoff_terms(model: CalibratedModel, t: float, bonds, weights):
    """Exponential-sum coefficients ``(C_j, v_j)`` of ``sum_i w_i M_t^{u_i}(x)``."""
    tau = model.spec.horizon - t
    coef, expo = [], []
    for k, w in zip(bonds, weights):
        u = model.u_at(k)
        ph, ps = exponents(model.spec, tau, np.array([u, -u], dtype=float))
        for a, v in zip(ph, ps):
            coef.append(0.5 * w * math.exp(a))
            expo.append(float(v))
    return np.array(coef), np.array(expo)


def _floorlet_terms(model, k, strike):
    level = 1.0 + model.tenor.accrual(k) * strike
    return payoff_terms(model, model.tenor.date(k - 1), [k, k - 1], [level, -1.0])


def _swaption_terms(model, alpha, beta, strike):
    idx, weights = swaption_weights(model, alpha, beta, strike)
    return payoff_terms(model, model.tenor.date(alpha), [alpha] + idx, [-1.0] + weights)


def fhat_from_terms(coef, expo, z, kappa: KappaPair):
    """Analytic Fourier transform of ``sum_j C_j exp(v_j x) 1{kappa1 < x < kappa2}``."""
    z = np.asarray(z, dtype=complex)
    if kappa.degenerate:
        return np.zeros_like(z)
    at_zero = z == 0
    out = _kernels._box_transform_np(1j * np.where(at_zero, 1.0, z), coef, expo,
                                     kappa.kappa1, kappa.kappa2)
    if np.any(at_zero):
        # removable point: the plain integral of the payoff
        k1, k2 = kappa.kappa1, kappa.kappa2
        area = sum(c * (k2 - k1) if v == 0 else c * (math.exp(v * k2) - math.exp(v * k1)) / v
                   for c, v in zip(coef, expo))
        out = np.where(at_zero, area, out)
    return out


def fhat_floorlet(model: CalibratedModel, k: int, strike: float, z, kappa: KappaPair):
    """Transform of the floorlet payoff ``(K~ M^{u_k} - M^{u_{k-1}}) 1{kappa1 < x < kappa2}``."""
    coef, expo = _floorlet_terms(model, k, strike)
    return fhat_from_terms(coef, expo, z, kappa)


def fhat_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float, z, kappa: KappaPair):
    """Transform of the put-swaption payoff on ``(kappa1, kappa2)``."""
    coef, expo = _swaption_terms(model, alpha, beta, strike)
    return fhat_from_terms(coef, expo, z, kappa)


# ---------------------------------------------------------------------------
# dampening


def pole_images(model: CalibratedModel, expiry: float) -> np.ndarray:
    """``{0} U {psi_{T-expiry}(+-u_j)}``: where the closed-form transform has removable poles."""
    us = np.array(model.u, dtype=float)
    _, ps = exponents(model.spec, model.spec.horizon - expiry, np.concatenate([us, -us]))
    return np.concatenate([[0.0], ps])


def choose_R(model: CalibratedModel, expiry_index: int, start: float | None = None) -> float:
    """Negative dampening inside the domain, at least ``1e-3`` away from every pole image."""
    lo, _ = domain_real(model.spec)
    if start is None:
        start = -min(1.0, 0.5 * abs(lo)) if math.isfinite(lo) else -1.0
    poles = pole_images(model, model.tenor.date(expiry_index))
    floor = (1 - 1e-6) * lo if math.isfinite(lo) else -math.inf
    for step in range(1_000_000):
        R = start - step * POLE_DISTANCE
        if R <= floor:
            break
        if np.min(np.abs(poles - R)) >= POLE_DISTANCE:
            return R
    raise ConfigError("no admissible dampening parameter inside the domain")


# ---------------------------------------------------------------------------
# quadrature


def _gk15(fn, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = fn(nodes.ravel()).reshape(nodes.shape)
    k = half * (vals @ _KRONROD)
    g = half * (vals @ _GAUSS)
    env = np.max(np.abs(vals) * nodes * nodes, axis=1)
    return k, np.abs(k - g), env


def _integrate_block(fn, a, b, panel_width, abs_tol, budget):
    n = max(1, int(math.ceil((b - a) / panel_width)))
    edges = np.linspace(a, b, n + 1)
    lo, hi = edges[:-1], edges[1:]
    vals, errs, env = _gk15(fn, lo, hi)
    evals = 15 * n
    done_val = 0.0
    done_err = 0.0
    env_max = float(env.max())
    while True:
        total_err = done_err + errs.sum()
        if total_err <= abs_tol or lo.size == 0:
            break
        share = abs_tol * (hi - lo) / (b - a)
        bad = errs > share
        if not bad.any():
            bad[np.argmax(errs)] = True
        done_val += vals[~bad].sum()
        done_err += errs[~bad].sum()
        lo, hi = lo[bad], hi[bad]
        if evals + 30 * lo.size > budget:
            raise IntegrationError("panel budget exhausted", done_val + vals[bad].sum(),
                                   done_err + errs[bad].sum())
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        vals, errs, env = _gk15(fn, lo, hi)
        evals += 15 * lo.size
        env_max = max(env_max, float(env.max()))
    return done_val + vals.sum(), done_err + errs.sum(), env_max, evals


def adaptive_inversion(integrand: Callable[[np.ndarray], np.ndarray], *, panel_width: float = 1.0,
                       rtol: float = DEFAULT_RTOL, truncation_rtol: float = TRUNCATION_RTOL,
                       atol: float = 1e-300, offset: float = 0.0,
                       max_evals: int = 15 * MAX_PANELS) -> QuadratureInfo:
    """``int_0^inf integrand(w) dw`` for an integrand decaying at least like ``w^-2``.

    The half line is swept in blocks of doubling length, each integrated with
    adaptively refined Gauss-Kronrod 7-15 panels. Integration stops once the
    tail bound ``C / W`` (``C`` the largest ``|integrand| w^2`` seen on the last
    block, ``W`` its right end) falls below ``truncation_rtol`` times the
    running integral. ``offset`` is a known addend of the final answer (an
    analytically integrated part) that counts towards the relative scale.
    """
    total = 0.0
    err = 0.0
    evals = 0
    a = 0.0
    length = 8.0 * panel_width
    scale = None
    width = panel_width
    while True:
        b = a + length
        tol = max(rtol * abs(scale), atol) if scale is not None else atol
        if scale is None:
            # first pass fixes the scale of the answer
            val, e, env, n = _integrate_block(integrand, a, b, panel_width, math.inf, max_evals)
            scale = val + offset if val + offset != 0.0 else 1e-300
            tol = max(rtol * abs(scale), atol)
        val, e, env, n = _integrate_block(integrand, a, b, width, tol * length / b, max_evals - evals)
        total += val
        err += e
        evals += n
        tail = env / b
        scale = total + offset if total + offset != 0.0 else scale
        if tail <= truncation_rtol * abs(total + offset) or tail <= atol:
            return QuadratureInfo(total, err, tail, b, evals)
        if evals >= max_evals:
            raise IntegrationError("tail did not decay within the evaluation budget", total, err + tail)
        a = b
        length *= 2.0
        # far-tail panels may span several periods; refinement catches any misfit
        width = min(2.0 * width, MAX_PANEL_GROWTH * panel_width)


def integrate_inversion(mgf_slice: Callable[[np.ndarray], np.ndarray],
                        fhat_slice: Callable[[np.ndarray], np.ndarray], *,
                        full_output: bool = False, **kwargs):
    """``(1/pi) int_0^inf Re(mgf_slice(w) * fhat_slice(w)) dw``.

    ``mgf_slice(w)`` should return ``M(R + i w)`` and ``fhat_slice(w)`` the
    transform at ``w - i R``. Keyword arguments go to :func:`adaptive_inversion`.
    """
    info = adaptive_inversion(lambda w: (mgf_slice(w) * fhat_slice(w)).real, **kwargs)
    value = info.value / math.pi
    if full_output:
        return value, info
    return value


# ---------------------------------------------------------------------------
# pricing


def _exp_integral(c, rate, lo, hi):
    """``int_lo^hi c e^{rate y} dy`` with a series for tiny ``rate*(hi-lo)``."""
    d = hi - lo
    sd = rate * d
    if abs(sd) < SERIES_CUTOFF:
        return c * math.exp(rate * lo) * d * (1.0 + 0.5 * sd)
    return c * math.exp(rate * lo) * math.expm1(sd) / rate


def singular_part(spec, t: float, coef, expo, kappa1: float, kappa2: float):
    """Expectation of the payoff against the atom and first-order jump densities.

    Without a diffusion the law of ``X_t`` is ``p0 * (delta_loc + a+ Exp_+ + a- Exp_- + rest)``
    where ``Exp_+`` (``Exp_-``) is the density ``alpha e^{-alpha |y - loc|}`` right
    (left) of ``loc`` and ``a+- = beta+- (e^{lam t} - 1)``. Returns ``(value, p0, loc)``;
    the Fourier integral then only sees ``rest``.
    """
    p0, loc = point_mass(spec, t, spec.x0)
    value = 0.0
    if kappa1 < loc < kappa2:
        value += float(np.sum(coef * np.exp(expo * loc)))
    if spec.has_jumps:
        q = math.expm1(spec.lam * t)
        lo = max(loc, kappa1)
        if spec.beta_plus > 0 and lo < kappa2:
            ap = spec.alpha_plus
            w = spec.beta_plus * ap * q
            value += sum(
                _exp_integral(w * c * math.exp(-ap * (lo - loc)) * math.exp(v * lo), v - ap, 0.0, kappa2 - lo)
                for c, v in zip(coef, expo))
        hi = min(loc, kappa2)
        if spec.beta_minus > 0 and hi > kappa1:
            am = spec.alpha_minus
            w = spec.beta_minus * am * q
            value += sum(
                _exp_integral(w * c * math.exp(-am * (loc - hi)) * math.exp(v * hi), v + am, kappa1 - hi, 0.0)
                for c, v in zip(coef, expo))
    return p0 * value, p0, loc


# neglected tail expectation relative to sum_j |C_j| M(v_j)
WINDOW_RTOL = 1e-16
_TILTS = (1e-3, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.85)


def _log_mgf(spec, t, a):
    ph, ps = exponents(spec, t, a)
    return float(ph + ps * spec.x0)


def _tail_edge(spec, t, coef, expo, log_budget, tilts, side):
    """Innermost ``L`` whose Chernoff bound on the tail beyond ``L`` fits the budget.

    For a tilt ``a`` below (``side=-1``) or above (``side=+1``) every ``v_j``,
    ``E[e^{v X} 1{X < L}] <= e^{(v - a) L} M(a)`` and symmetrically on the right.
    """
    centre = mean(spec, t, spec.x0)
    mag = np.log(np.abs(coef))
    best = math.inf
    for a in tilts:
        try:
            log_m = _log_mgf(spec, t, a)
        except CoshLiborError:
            continue

        def excess(s):
            # decreasing in the distance s from the centre
            return float(np.logaddexp.reduce(mag + (expo - a) * (centre + side * s))) + log_m - log_budget

        if excess(0.0) <= 0:
            return centre
        hi = 1.0
        while excess(hi) > 0:
            hi *= 2.0
        best = min(best, optimize.brentq(excess, 0.5 * hi if hi > 1 else 0.0, hi, xtol=1e-9))
    return centre + side * best


def mass_window(spec, t: float, coef, expo, rtol: float = WINDOW_RTOL) -> tuple[float, float]:
    """Interval outside which ``E[|f(X_t)|]`` is below ``rtol * sum_j |C_j| M(v_j)``.

    Clipping the exercise interval to this window keeps ``e^{R x} f(x)`` from
    reaching magnitudes where the transform drowns in cancellation.
    """
    coef = np.asarray(coef, dtype=float)
    expo = np.asarray(expo, dtype=float)
    keep = coef != 0.0
    coef, expo = coef[keep], expo[keep]
    if coef.size == 0 or t == 0.0:
        return -math.inf, math.inf
    scale = float(np.logaddexp.reduce(np.log(np.abs(coef)) + [_log_mgf(spec, t, v) for v in expo]))
    log_budget = scale + math.log(rtol)
    lo_dom, hi_dom = domain_real(spec)
    vmin, vmax = float(expo.min()), float(expo.max())
    if math.isfinite(lo_dom):
        left = [lo_dom * (1 - d) for d in _TILTS if lo_dom * (1 - d) < vmin]
    else:
        left = [vmin - d for d in (0.5, 1, 2, 5, 10, 20, 50, 100)]
    if math.isfinite(hi_dom):
        right = [hi_dom * (1 - d) for d in _TILTS if hi_dom * (1 - d) > vmax]
    else:
        right = [vmax + d for d in (0.5, 1, 2, 5, 10, 20, 50, 100)]
    L1 = _tail_edge(spec, t, coef, expo, log_budget, left, -1)
    L2 = _tail_edge(spec, t, coef, expo, log_budget, right, +1)
    return L1, L2


def _expectation(model: CalibratedModel, expiry: float, coef, expo, kappa: KappaPair,
                 R: float, rtol: float, atol: float = 1e-300):
    """``E[f(X_expiry)]`` under the terminal measure for the exponential-sum payoff.

    The exercise interval is first clipped to :func:`mass_window`. After a cut
    at ``L2 < kappa2`` the payoff no longer vanishes at its right end; with
    ``R < 0`` the transform then prices ``G = (f - f(L2)) 1{x < L2}``
    (continuous, still ``O(w^-2)``) and ``f(L2) P(X < L2)`` is added back. Both
    neglected pieces, ``f(L2) P(X >= L2)`` and ``f(L1) P(X < L1)`` after a cut
    on the left, sit under the window's tail bound. ``R > 0`` mirrors this.
    """
    spec = model.spec
    w1, w2 = mass_window(spec, expiry, coef, expo)
    k1, k2 = max(kappa.kappa1, w1), min(kappa.kappa2, w2)
    if not k1 < k2:
        return 0.0, QuadratureInfo(0.0, 0.0, 0.0, 0.0, 0)
    # R < 0 pairs with a G that is flat on the left, R > 0 with one flat on the right
    if R < 0:
        edge = float(np.sum(coef * np.exp(expo * k2))) if k2 < kappa.kappa2 else 0.0
    else:
        edge = float(np.sum(coef * np.exp(expo * k1))) if k1 > kappa.kappa1 else 0.0
    singular = 0.0
    rest_mass = 1.0
    atom_p = -1.0
    atom_loc = 0.0
    if point_mass(spec, expiry, spec.x0) is not None:
        singular, atom_p, atom_loc = singular_part(spec, expiry, coef, expo, k1, k2)
        if not spec.has_jumps:
            return singular, QuadratureInfo(0.0, 0.0, 0.0, 0.0, 0)
        # mass of the law left after removing the atom and first-order densities
        first = (spec.beta_plus + spec.beta_minus) * math.expm1(spec.lam * expiry)
        rest_mass = 1.0 - atom_p * (1.0 + first)
    known = singular + edge * rest_mass
    params = spec.kernel_params()

    def integrand(w):
        return _kernels.inversion_integrand(w, R, expiry, spec.x0, params, atom_p, atom_loc,
                                            coef, expo, k1, k2)

    centre = mean(spec, expiry, spec.x0)
    panel = math.pi / (max(abs(k1 - centre), abs(k2 - centre)) + 1.0)
    info = adaptive_inversion(integrand, panel_width=panel, rtol=rtol, atol=math.pi * atol,
                              offset=math.pi * known)
    return known + info.value / math.pi, info


def price_floorlet(model: CalibratedModel, k: int, strike: float, *, R: float | None = None,
                   rtol: float = DEFAULT_RTOL) -> PricingResult:
    """Time-0 floorlet on ``F^k`` (fixing ``T_{k-1}``, paid at ``T_k``)."""
    kappa = find_kappa_floorlet(model, k, strike)
    R = choose_R(model, k - 1) if R is None else R
    if kappa.degenerate:
        return PricingResult(0.0, kappa, R, 0.0, 0.0)
    coef, expo = _floorlet_terms(model, k, strike)
    value, info = _expectation(model, model.tenor.date(k - 1), coef, expo, kappa, R, rtol)
    p_T = model.curve.discounts[-1]
    return PricingResult(p_T * value, kappa, R, p_T * info.error / math.pi,
                         p_T * info.truncation_bound / math.pi)


def price_caplet(model: CalibratedModel, k: int, strike: float, **kwargs) -> PricingResult:
    """Caplet on ``F^k`` from the floorlet by put/call parity.

    Deep out of the money the parity sum cancels most of the floorlet's digits;
    there the caplet is priced from its own payoff instead.
    """
    flt = price_floorlet(model, k, strike, **kwargs)
    level = 1.0 + model.tenor.accrual(k) * strike
    parity = model.discount(k - 1) - level * model.discount(k)
    price = flt.price + parity
    if _parity_cancels(price, flt.price):
        return price_caplet_direct(model, k, strike, rtol=kwargs.get("rtol", DEFAULT_RTOL),
                                   atol=_fallback_atol(price))
    return PricingResult(price, flt.kappa, flt.dampening, flt.integral_error_estimate, flt.truncation_bound)


def _check_swaption_strict(model, alpha, beta):
    for k in range(alpha, beta):
        if not model.u_at(k) > model.u_at(k + 1):
            raise PreconditionError(f"u must be strictly decreasing on [{alpha}, {beta}]")


def price_put_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float, *,
                       R: float | None = None, rtol: float = DEFAULT_RTOL) -> PricingResult:
    """Time-0 put (receiver) swaption on the swap from ``T_alpha`` to ``T_beta``."""
    kappa = find_kappa_swaption(model, alpha, beta, strike)
    _check_swaption_strict(model, alpha, beta)
    R = choose_R(model, alpha) if R is None else R
    if kappa.degenerate:
        return PricingResult(0.0, kappa, R, 0.0, 0.0)
    coef, expo = _swaption_terms(model, alpha, beta, strike)
    value, info = _expectation(model, model.tenor.date(alpha), coef, expo, kappa, R, rtol)
    p_T = model.curve.discounts[-1]
    return PricingResult(p_T * value, kappa, R, p_T * info.error / math.pi,
                         p_T * info.truncation_bound / math.pi)


def annuity(model: CalibratedModel, alpha: int, beta: int) -> float:
    """``sum_{k=alpha+1}^{beta} Delta_k P(0, T_k)``."""
    return sum(model.tenor.accrual(k) * model.discount(k) for k in range(alpha + 1, beta + 1))


def forward_swap_rate(model: CalibratedModel, alpha: int, beta: int) -> float:
    return (model.discount(alpha) - model.discount(beta)) / annuity(model, alpha, beta)


def price_payer_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float,
                         **kwargs) -> PricingResult:
    """Payer swaption from the receiver by payer/receiver parity (direct payoff when that cancels)."""
    put = price_put_swaption(model, alpha, beta, strike, **kwargs)
    parity = model.discount(alpha) - model.discount(beta) - strike * annuity(model, alpha, beta)
    price = put.price + parity
    if _parity_cancels(price, put.price):
        return price_payer_swaption_direct(model, alpha, beta, strike, rtol=kwargs.get("rtol", DEFAULT_RTOL),
                                           atol=_fallback_atol(price))
    return PricingResult(price, put.kappa, put.dampening, put.integral_error_estimate, put.truncation_bound)


def _parity_cancels(call: float, put: float) -> bool:
    # more than three digits of the put lost in the sum
    return put > 0.0 and abs(call) < PARITY_CANCEL * put


def _fallback_atol(estimate: float) -> float:
    return min(DIRECT_ATOL, max(1e-10 * abs(estimate), 1e-300))


# ---------------------------------------------------------------------------
# direct call-side prices, used to test the parity identities


def balanced_R(model: CalibratedModel, expiry: float, coef, expo, k1: float, k2: float) -> float:
    """Admissible dampening minimising ``log M(R) + max_x (log|f(x)| - R x)`` on ``[k1, k2]``.

    That sum bounds the size of the terms the inversion has to cancel, so the
    minimiser keeps the round-off floor lowest. ``R`` may be positive here:
    only the pole images and the domain restrict it on a bounded interval.
    """
    spec = model.spec
    lo, hi = domain_real(spec)
    lo = max(0.99 * lo, -40.0) if math.isfinite(lo) else -40.0
    hi = min(0.99 * hi, 40.0) if math.isfinite(hi) else 40.0
    xs = np.linspace(k1, k2, 401)
    f = np.abs(np.exp(np.outer(xs, expo)) @ coef)
    logf = np.log(np.maximum(f, 1e-300))
    poles = pole_images(model, expiry)
    best, best_cost = None, math.inf
    for R in np.linspace(lo, hi, 321):
        if np.min(np.abs(poles - R)) < POLE_DISTANCE:
            continue
        cost = _log_mgf(spec, expiry, R) + float(np.max(logf - R * xs))
        if cost < best_cost:
            best, best_cost = float(R), cost
    if best is None:
        raise ConfigError("no admissible dampening parameter inside the domain")
    return best


def _complement_expectation(model, expiry, coef, expo, kappa, R, rtol, atol):
    # (-f)^+ lives outside (kappa1, kappa2), or everywhere when kappa is degenerate
    neg = -np.asarray(coef)
    if kappa.degenerate:
        pieces = [KappaPair(-math.inf, math.inf, kappa.xi, False)]
    else:
        pieces = [KappaPair(-math.inf, kappa.kappa1, kappa.xi, False),
                  KappaPair(kappa.kappa2, math.inf, kappa.xi, False)]
    value = err = trunc = 0.0
    for piece in pieces:
        if R is None:
            w1, w2 = mass_window(model.spec, expiry, neg, expo)
            k1, k2 = max(piece.kappa1, w1), min(piece.kappa2, w2)
            if not k1 < k2:
                continue
            r = balanced_R(model, expiry, neg, expo, k1, k2)
        else:
            r = R
        v, info = _expectation(model, expiry, neg, expo, piece, r, rtol, atol)
        value += v
        err += info.error / math.pi
        trunc += info.truncation_bound / math.pi
    return value, err, trunc


def price_caplet_direct(model: CalibratedModel, k: int, strike: float, *, R: float | None = None,
                        rtol: float = DEFAULT_RTOL, atol: float = DIRECT_ATOL) -> PricingResult:
    """Caplet from its own payoff ``(M^{u_{k-1}} - K~ M^{u_k})^+``, with no parity step.

    Each piece of the exercise set gets its own :func:`balanced_R` unless ``R``
    is given; ``atol`` (price units) caps the work on deep out-of-the-money cases.
    """
    kappa = find_kappa_floorlet(model, k, strike)
    coef, expo = _floorlet_terms(model, k, strike)
    p_T = model.curve.discounts[-1]
    value, err, trunc = _complement_expectation(model, model.tenor.date(k - 1), coef, expo, kappa, R,
                                                rtol, atol / p_T)
    return PricingResult(p_T * value, kappa, math.nan if R is None else R, p_T * err, p_T * trunc)


def price_payer_swaption_direct(model: CalibratedModel, alpha: int, beta: int, strike: float, *,
                                R: float | None = None, rtol: float = DEFAULT_RTOL,
                                atol: float = DIRECT_ATOL) -> PricingResult:
    """Payer swaption from its own payoff, with no parity step (see :func:`price_caplet_direct`)."""
    kappa = find_kappa_swaption(model, alpha, beta, strike)
    _check_swaption_strict(model, alpha, beta)
    coef, expo = _swaption_terms(model, alpha, beta, strike)
    p_T = model.curve.discounts[-1]
    value, err, trunc = _complement_expectation(model, model.tenor.date(alpha), coef, expo, kappa, R,
                                                rtol, atol / p_T)
    return PricingResult(p_T * value, kappa, math.nan if R is None else R, p_T * err, p_T * trunc)
