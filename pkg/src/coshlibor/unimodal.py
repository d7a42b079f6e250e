"""Extremum and root finding for unimodal ratio functions.

For ``u_0 >= u_i >= 0`` (at least one strict) and ``c_i > 0`` the function

    g(x) = sum_i c_i M_t^{u_i}(x) / M_t^{u_0}(x)

has a single maximum and decays to 0 on both sides. The floorlet and put
swaption exercise regions are the sets where such a function exceeds a level,
which makes them intervals ``(kappa1, kappa2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import NumericalError, PreconditionError
from .model import LOG2, CalibratedModel, bond_exponents

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_DOUBLINGS = 200
ROOT_XTOL = 1e-13
DEGENERACY_LEVEL = 1e-14


@dataclass(frozen=True)
class KappaPair:
    """Boundaries of the payoff interval around the extremum ``xi``."""

    kappa1: float
    kappa2: float
    xi: float
    degenerate: bool

    @classmethod
    def empty(cls, xi: float) -> "KappaPair":
        return cls(xi, xi, xi, True)


def _expand_bracket(f: Callable[[float], float], seed: float) -> tuple[float, float]:
    f0 = f(seed)
    right = seed + 1.0
    fr = f(right)
    if fr > f0:
        direction, behind, best, fbest = 1.0, seed, right, fr
    else:
        left = seed - 1.0
        fl = f(left)
        if fl <= f0:
            return left, right
        direction, behind, best, fbest = -1.0, seed, left, fl
    step = 1.0
    for _ in range(MAX_DOUBLINGS):
        step *= 2.0
        ahead = best + direction * step
        fa = f(ahead)
        if not fa > fbest:
            return (behind, ahead) if behind < ahead else (ahead, behind)
        behind, best, fbest = best, ahead, fa
    raise NumericalError(f"no bracket for the extremum after {MAX_DOUBLINGS} doublings from {seed}")


def _golden(f, lo, hi, width):
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > width:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    return lo, hi


def find_extremum(f: Callable[[float], float], seed: float, *,
                  derivative: Callable[[float], float] | None = None,
                  maximize: bool = True, xtol: float = 1e-13) -> float:
    """Location of the extremum of a unimodal function.

    Expands a bracket from ``seed`` (unit first step, doubling), narrows it by
    golden-section search and polishes the result by bisection on the sign of
    ``derivative`` (central differences when no derivative is given).
    """
    if not maximize:
        g = f
        f = lambda x: -g(x)  # noqa: E731
        if derivative is not None:
            dg = derivative
            derivative = lambda x: -dg(x)  # noqa: E731
    lo, hi = _expand_bracket(f, seed)
    lo, hi = _golden(f, lo, hi, 1e-5 * (1.0 + abs(0.5 * (lo + hi))))

    if derivative is None:
        def derivative(x):
            h = 1e-6 * (1.0 + abs(x))
            return f(x + h) - f(x - h)

    d_lo, d_hi = derivative(lo), derivative(hi)
    if not (d_lo >= 0.0 >= d_hi):
        return 0.5 * (lo + hi)
    while hi - lo > xtol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if derivative(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_root(g: Callable[[float], float], a: float, b: float, xtol: float = ROOT_XTOL) -> float:
    """Root of ``g`` in ``[a, b]`` given a sign change; returns the endpoint with smaller ``|g|``."""
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if (ga > 0) == (gb > 0):
        raise NumericalError(f"no sign change on [{a}, {b}]")
    while abs(b - a) > xtol:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (ga > 0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    return a if abs(ga) <= abs(gb) else b


def _flank_root(g, xi, direction):
    step = 1.0
    inner = xi
    for _ in range(MAX_DOUBLINGS):
        outer = xi + direction * step
        if g(outer) <= 0.0:
            return bisect_root(g, inner, outer)
        inner = outer
        step *= 2.0
    raise NumericalError("payoff region does not close within the bracket limit")


def kappa_from_level(g: Callable[[float], float], xi: float) -> KappaPair:
    """Roots of ``g`` on both sides of its maximiser ``xi``; degenerate when ``g(xi)`` is not positive."""
    if not g(xi) > DEGENERACY_LEVEL:
        return KappaPair.empty(xi)
    k1 = _flank_root(g, xi, -1.0)
    k2 = _flank_root(g, xi, 1.0)
    return KappaPair(min(k1, xi), max(k2, xi), xi, False)


# ---------------------------------------------------------------------------
# ratio functions of the cosh martingales


def _log_m(e, x):
    ap, bp, am, bm = e
    a = ap + bp * x
    b = am + bm * x
    hi = a if a > b else b
    return hi + math.log1p(math.exp(-abs(a - b))) - LOG2


def _slope_m(e, x):
    ap, bp, am, bm = e
    d = (am + bm * x) - (ap + bp * x)
    w_plus = 1.0 / (1.0 + math.exp(min(d, 700.0)))
    return w_plus * bp + (1.0 - w_plus) * bm


def cosh_ratio_log(spec, t: float, u0: float, us: Sequence[float], cs: Sequence[float]):
    """``(log g, d/dx log g)`` for ``g(x) = sum_i c_i M_t^{u_i}(x) / M_t^{u_0}(x)``."""
    log_c = [math.log(c) for c in cs]
    e0 = bond_exponents(spec, u0, t)
    es = [bond_exponents(spec, u, t) for u in us]

    def log_g(x):
        logs = [lc + _log_m(e, x) for lc, e in zip(log_c, es)]
        top = max(logs)
        return top + math.log(sum(math.exp(v - top) for v in logs)) - _log_m(e0, x)

    def slope(x):
        logs = [lc + _log_m(e, x) for lc, e in zip(log_c, es)]
        top = max(logs)
        w = [math.exp(v - top) for v in logs]
        total = sum(w)
        return sum(wi * _slope_m(e, x) for wi, e in zip(w, es)) / total - _slope_m(e0, x)

    return log_g, slope


def _check_strict(model: CalibratedModel, k_prev: int, k_next: int) -> None:
    if not model.u_at(k_prev) > model.u_at(k_next):
        raise PreconditionError(
            f"u_{k_prev} = {model.u_at(k_prev)} must exceed u_{k_next} = {model.u_at(k_next)}; "
            "the forward rate between them is identically zero")


def find_kappa_floorlet(model: CalibratedModel, k: int, strike: float) -> KappaPair:
    """Exercise interval of the floorlet on ``F^k`` (fixing ``T_{k-1}``, payment ``T_k``).

    The region is where ``1 + Delta_k K`` exceeds ``M^{u_{k-1}} / M^{u_k}`` at ``T_{k-1}``.
    """
    if not 2 <= k <= model.n + 1:
        raise IndexError(f"forward index {k} outside 2..{model.n + 1}")
    if strike < 0:
        raise PreconditionError("strike must be nonnegative")
    _check_strict(model, k - 1, k)
    spec = model.spec
    t = model.tenor.date(k - 1)
    u_prev, u_next = model.u_at(k - 1), model.u_at(k)
    level = 1.0 + model.tenor.accrual(k) * strike
    log_inv, slope = cosh_ratio_log(spec, t, u_prev, [u_next], [1.0])
    xi = find_extremum(log_inv, spec.x0, derivative=slope)

    def g(x):
        return level - math.exp(min(-log_inv(x), 700.0))

    return kappa_from_level(g, xi)


def swaption_weights(model: CalibratedModel, alpha: int, beta: int, strike: float):
    """Bond indices and weights ``c_k`` of ``M^{u_beta} + K sum_k Delta_k M^{u_k}``."""
    idx = list(range(alpha + 1, beta + 1))
    weights = [strike * model.tenor.accrual(k) for k in idx]
    weights[-1] += 1.0
    return idx, weights


def _check_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float) -> None:
    if not 1 <= alpha < beta <= model.n + 1:
        raise IndexError(f"need 1 <= alpha < beta <= {model.n + 1}, got ({alpha}, {beta})")
    if strike < 0:
        raise PreconditionError("strike must be nonnegative")
    _check_strict(model, alpha, alpha + 1)


def find_kappa_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float) -> KappaPair:
    """Exercise interval of the put swaption on the swap ``T_alpha -> T_beta``."""
    _check_swaption(model, alpha, beta, strike)
    spec = model.spec
    t = model.tenor.date(alpha)
    idx, weights = swaption_weights(model, alpha, beta, strike)
    positive = [(model.u_at(k), c) for k, c in zip(idx, weights) if c > 0]
    log_g, slope = cosh_ratio_log(spec, t, model.u_at(alpha), [u for u, _ in positive],
                                   [c for _, c in positive])
    xi = find_extremum(log_g, spec.x0, derivative=slope)

    def g(x):
        return math.expm1(min(log_g(x), 700.0))

    return kappa_from_level(g, xi)
