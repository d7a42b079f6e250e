"""Cosh-martingale bond prices and their calibration to a discount curve.

Normalised bond prices are ``P(t, T_k) / P(t, T) = M_t^{u_k}(X_t)`` with

    M_t^u(x) = E[cosh(u X_T) | X_t = x]
             = (exp(phi_{T-t}(u) + psi_{T-t}(u) x) + exp(phi_{T-t}(-u) + psi_{T-t}(-u) x)) / 2.

Indices are 1-based as in the usual tenor notation: dates ``T_1 < ... <
T_{N+1} = T``, calibrated parameters ``u_1 >= ... >= u_N``, and ``u_{N+1} = 0``
because ``P(t, T)/P(t, T) = 1``. The forward rate ``F^k`` accrues over
``(T_{k-1}, T_k]`` and fixes at ``T_{k-1}``, so it exists for ``k >= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .affine import AffineProcessSpec, domain_real, exponents
from .errors import CalibrationError, DomainError

LOG2 = math.log(2.0)
UPPER_FRACTION = 1.0 - 1e-6
BISECTION_RTOL = 1e-14
MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class TenorStructure:
    """Strictly increasing tenor dates ``T_1 < ... < T_{N+1}`` in years."""

    dates: tuple[float, ...]

    def __post_init__(self):
        dates = tuple(float(d) for d in self.dates)
        object.__setattr__(self, "dates", dates)
        if len(dates) < 2:
            raise ValueError("a tenor structure needs at least two dates")
        if dates[0] <= 0:
            raise ValueError("first tenor date must be positive")
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise ValueError("tenor dates must be strictly increasing")

    @classmethod
    def regular(cls, step: float, count: int, start: float | None = None,
                horizon: float | None = None) -> "TenorStructure":
        """``start, start+step, ...`` (``count`` dates), optionally closed by ``horizon``."""
        start = step if start is None else start
        dates = [start + i * step for i in range(count)]
        if horizon is not None and not math.isclose(dates[-1], horizon, rel_tol=1e-12):
            dates.append(horizon)
        return cls(tuple(dates))

    @property
    def n(self) -> int:
        """Number ``N`` of calibrated bonds (the last date is the horizon)."""
        return len(self.dates) - 1

    @property
    def horizon(self) -> float:
        return self.dates[-1]

    def date(self, k: int) -> float:
        if not 1 <= k <= self.n + 1:
            raise IndexError(f"tenor index {k} outside 1..{self.n + 1}")
        return self.dates[k - 1]

    def accrual(self, k: int) -> float:
        """``Delta_k = T_k - T_{k-1}`` with ``T_0 = 0``."""
        return self.date(k) - (self.date(k - 1) if k > 1 else 0.0)

    def index_of(self, t: float) -> int:
        """1-based index ``k`` with ``T_k == t`` (to 1e-9 years)."""
        for k, d in enumerate(self.dates, start=1):
            if abs(d - t) <= 1e-9:
                return k
        raise ValueError(f"{t} is not a tenor date")


@dataclass(frozen=True)
class DiscountCurve:
    """Initial discount factors ``P(0, T_k)`` for ``k = 1..N+1``."""

    discounts: tuple[float, ...]

    def __post_init__(self):
        discounts = tuple(float(p) for p in self.discounts)
        object.__setattr__(self, "discounts", discounts)
        if any(not 0 < p <= 1 for p in discounts):
            raise ValueError("discount factors must lie in (0, 1]")
        if any(b > a for a, b in zip(discounts, discounts[1:])):
            raise ValueError("discount factors must be non-increasing (nonnegative forward rates)")

    @classmethod
    def flat(cls, tenor: TenorStructure, rate: float, period: float) -> "DiscountCurve":
        """Flat curve with simple compounding per ``period``: ``(1 + r*period)^(-t/period)``."""
        base = 1.0 + rate * period
        return cls(tuple(base ** (-t / period) for t in tenor.dates))

    def discount(self, k: int) -> float:
        return self.discounts[k - 1]

    def normalized(self, k: int) -> float:
        """``P(0, T_k) / P(0, T)``."""
        return self.discounts[k - 1] / self.discounts[-1]


@dataclass(frozen=True)
class CalibratedModel:
    """Process, tenor, curve and the fitted non-increasing ``u`` sequence."""

    spec: AffineProcessSpec
    tenor: TenorStructure
    curve: DiscountCurve
    u: tuple[float, ...]
    residuals: tuple[float, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.tenor.n

    def u_at(self, k: int) -> float:
        """``u_k`` for ``k = 1..N+1`` (``u_{N+1} = 0``)."""
        if not 1 <= k <= self.n + 1:
            raise IndexError(f"bond index {k} outside 1..{self.n + 1}")
        return 0.0 if k == self.n + 1 else self.u[k - 1]

    def discount(self, k: int) -> float:
        return self.curve.discount(k)


# ---------------------------------------------------------------------------
# martingale evaluation


def bond_exponents(spec: AffineProcessSpec, u: float, t: float):
    """Affine exponents ``(a+, b+, a-, b-)`` with ``2 M_t^u(x) = e^{a+ + b+ x} + e^{a- + b- x}``."""
    tau = spec.horizon - t
    if tau < -1e-12 * spec.horizon:
        raise DomainError(f"time {t} beyond horizon {spec.horizon}")
    tau = max(tau, 0.0)
    (ap, am), (bp, bm) = exponents(spec, tau, np.array([u, -u], dtype=float))
    return float(ap), float(bp), float(am), float(bm)


def log_martingale_value(spec: AffineProcessSpec, u: float, t: float, x):
    """``log M_t^u(x)`` computed without overflow."""
    ap, bp, am, bm = bond_exponents(spec, u, t)
    x = np.asarray(x, dtype=float)
    return np.logaddexp(ap + bp * x, am + bm * x) - LOG2


def log_martingale_slope(spec: AffineProcessSpec, u: float, t: float, x):
    """``d/dx log M_t^u(x)``: a softmax-weighted average of ``psi(+u)`` and ``psi(-u)``."""
    ap, bp, am, bm = bond_exponents(spec, u, t)
    x = np.asarray(x, dtype=float)
    e_plus = ap + bp * x
    e_minus = am + bm * x
    w_plus = 1.0 / (1.0 + np.exp(np.clip(e_minus - e_plus, -700, 700)))
    return w_plus * bp + (1.0 - w_plus) * bm


def martingale_value(spec: AffineProcessSpec, u: float, t: float, x):
    """Value of the cosh martingale ``M_t^u`` at state ``x``."""
    out = np.exp(log_martingale_value(spec, u, t, x))
    return float(out) if out.ndim == 0 else out


def initial_normalized_bond(spec: AffineProcessSpec, u: float) -> float:
    """``m(u) = M_0^u(x0) = E[cosh(u X_T)]``; equals 1 at ``u = 0`` and increases in ``u``."""
    return martingale_value(spec, abs(u), 0.0, spec.x0)


# ---------------------------------------------------------------------------
# calibration


def _upper_bracket(spec: AffineProcessSpec, target: float, k: int) -> float:
    lo, hi = domain_real(spec)
    bound = min(-lo, hi)
    if math.isfinite(bound):
        u_hi = UPPER_FRACTION * bound
        if initial_normalized_bond(spec, u_hi) < target:
            raise CalibrationError(
                f"bond {k}: normalised price {target:.12g} exceeds the largest value "
                f"{initial_normalized_bond(spec, u_hi):.12g} reachable inside the domain",
                index=k)
        return u_hi
    u_hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        try:
            value = initial_normalized_bond(spec, u_hi)
        except FloatingPointError:
            value = math.inf
        if value >= target:
            return u_hi
        u_hi *= 2.0
    raise CalibrationError(f"bond {k}: no bracket for normalised price {target:.12g}", index=k)


def _solve_u(spec: AffineProcessSpec, target: float, k: int) -> float:
    if target <= 1.0:
        return 0.0
    lo, hi = 0.0, _upper_bracket(spec, target, k)
    while hi - lo > BISECTION_RTOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if initial_normalized_bond(spec, mid) < target:
            lo = mid
        else:
            hi = mid
    # the endpoint closer to the target in value
    r_lo = abs(initial_normalized_bond(spec, lo) - target)
    r_hi = abs(initial_normalized_bond(spec, hi) - target)
    return lo if r_lo <= r_hi else hi


def calibrate(spec: AffineProcessSpec, tenor: TenorStructure, curve: DiscountCurve) -> CalibratedModel:
    """Fit ``u_1 >= ... >= u_N`` so that ``m(u_k) = P(0, T_k) / P(0, T)``."""
    if len(curve.discounts) != len(tenor.dates):
        raise ValueError(f"curve has {len(curve.discounts)} discount factors, "
                         f"tenor has {len(tenor.dates)} dates")
    if not math.isclose(tenor.horizon, spec.horizon, rel_tol=1e-12):
        raise ValueError(f"last tenor date {tenor.horizon} differs from the process horizon {spec.horizon}")
    us = []
    residuals = []
    for k in range(1, tenor.n + 1):
        target = curve.normalized(k)
        u = _solve_u(spec, target, k)
        if us and u > us[-1]:
            u = us[-1]
        us.append(u)
        residuals.append(initial_normalized_bond(spec, u) / target - 1.0)
    return CalibratedModel(spec=spec, tenor=tenor, curve=curve, u=tuple(us),
                           residuals=tuple(residuals))


# ---------------------------------------------------------------------------
# forward rates


def _check_forward_index(model: CalibratedModel, k: int) -> None:
    if not 2 <= k <= model.n + 1:
        raise IndexError(f"forward index {k} outside 2..{model.n + 1}")


def forward_rate(model: CalibratedModel, t: float, x, k: int):
    """Simple forward rate ``F^k(t)`` over ``(T_{k-1}, T_k]`` at state ``x``."""
    _check_forward_index(model, k)
    if t > model.tenor.date(k - 1) + 1e-12:
        raise DomainError(f"F^{k} is fixed at {model.tenor.date(k - 1)}, asked for t={t}")
    spec = model.spec
    log_ratio = (log_martingale_value(spec, model.u_at(k - 1), t, x)
                 - log_martingale_value(spec, model.u_at(k), t, x))
    out = np.expm1(log_ratio) / model.tenor.accrual(k)
    return float(out) if np.ndim(out) == 0 else out


def forward_rate_lower_bound(model: CalibratedModel, k: int) -> float:
    """Smallest value ``F^k`` can take at its fixing date ``T_{k-1}``."""
    from .unimodal import find_extremum

    _check_forward_index(model, k)
    u_prev, u_next = model.u_at(k - 1), model.u_at(k)
    if u_prev <= u_next:
        return 0.0
    spec = model.spec
    t = model.tenor.date(k - 1)

    def log_inverse_ratio(x):
        return float(log_martingale_value(spec, u_next, t, x) - log_martingale_value(spec, u_prev, t, x))

    def slope(x):
        return float(log_martingale_slope(spec, u_next, t, x) - log_martingale_slope(spec, u_prev, t, x))

    xi = find_extremum(log_inverse_ratio, spec.x0, derivative=slope)
    return max(math.expm1(-log_inverse_ratio(xi)) / model.tenor.accrual(k), 0.0)
