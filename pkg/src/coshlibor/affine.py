"""One-dimensional affine driving processes.

Two families are supported:

* ``brownian``: ``X_t = x0 + drift*t + sigma*B_t`` with
  ``phi_t(u) = drift*u*t + sigma^2 u^2 t / 2`` and ``psi_t(u) = u``.
* ``jump_ou``: an Ornstein-Uhlenbeck process mean-reverting to ``theta`` at
  speed ``lam``, driven by ``sigma*B`` plus the difference of two compound
  Poisson processes with exponential jumps (rates ``alpha_plus``,
  ``alpha_minus``, intensities ``lam*beta_plus``, ``lam*beta_minus``).
  Here ``psi_t(u) = exp(-lam t) u``.

The conditional moment generating function is
``E[exp(u X_{s+t}) | X_s = x] = exp(phi_t(u) + psi_t(u) x)`` for complex ``u``
whose real part lies in :func:`domain_real`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IllConditionedError

#: relative distance to the domain boundary below which evaluation is refused
DOMAIN_EPS = 1e-6

BROWNIAN = "brownian"
JUMP_OU = "jump_ou"


@dataclass(frozen=True)
class AffineProcessSpec:
    """Parameters of the driving process plus horizon ``T`` and start ``x0``.

    Use :meth:`brownian` or :meth:`jump_ou` rather than the raw constructor.
    """

    kind: str
    horizon: float
    x0: float = 0.0
    sigma: float = 0.0
    drift: float = 0.0
    lam: float = 0.0
    alpha_plus: float = math.inf
    alpha_minus: float = math.inf
    beta_plus: float = 0.0
    beta_minus: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in (BROWNIAN, JUMP_OU):
            raise ValueError(f"unknown process kind {self.kind!r}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.kind == JUMP_OU:
            if not self.lam > 0:
                raise ValueError(f"lam must be > 0 for an OU process, got {self.lam}")
            if self.beta_plus < 0 or self.beta_minus < 0:
                raise ValueError("beta_plus and beta_minus must be >= 0")
            if self.has_jumps and not (self.alpha_plus > 0 and self.alpha_minus > 0):
                raise ValueError("alpha_plus and alpha_minus must be > 0 when jumps are present")

    @classmethod
    def brownian(cls, sigma: float = 1.0, drift: float = 0.0, x0: float = 0.0,
                 horizon: float = 10.0) -> "AffineProcessSpec":
        return cls(kind=BROWNIAN, horizon=horizon, x0=x0, sigma=sigma, drift=drift)

    @classmethod
    def jump_ou(cls, lam: float, alpha_plus: float, alpha_minus: float,
                beta_plus: float, beta_minus: float, sigma: float = 0.0,
                theta: float = 0.0, x0: float = 0.0,
                horizon: float = 10.0) -> "AffineProcessSpec":
        return cls(kind=JUMP_OU, horizon=horizon, x0=x0, sigma=sigma, lam=lam,
                   alpha_plus=alpha_plus, alpha_minus=alpha_minus,
                   beta_plus=beta_plus, beta_minus=beta_minus, theta=theta)

    @property
    def has_jumps(self) -> bool:
        return self.kind == JUMP_OU and (self.beta_plus > 0 or self.beta_minus > 0)

    def kernel_params(self) -> np.ndarray:
        """Flat float64 parameter vector consumed by the compiled kernels."""
        code = 0.0 if self.kind == BROWNIAN else 1.0
        ap = self.alpha_plus if self.has_jumps else 1.0
        am = self.alpha_minus if self.has_jumps else 1.0
        bp = self.beta_plus if self.has_jumps else 0.0
        bm = self.beta_minus if self.has_jumps else 0.0
        return np.array([code, self.sigma, self.drift, self.lam, ap, am, bp, bm,
                         self.theta], dtype=np.float64)


def domain_real(spec: AffineProcessSpec) -> tuple[float, float]:
    """Open interval of real ``u`` where the moment generating function is finite."""
    if spec.has_jumps:
        return (-spec.alpha_minus, spec.alpha_plus)
    return (-math.inf, math.inf)


def check_domain(spec: AffineProcessSpec, u) -> None:
    """Raise unless every ``Re(u)`` is admissible for ``spec``."""
    re = np.real(np.asarray(u))
    lo, hi = domain_real(spec)
    if np.any(re <= lo) or np.any(re >= hi) or np.any(np.isnan(re)):
        raise DomainError(f"Re(u) outside the domain ({lo}, {hi})")
    if math.isfinite(hi) and np.any(re > (1 - DOMAIN_EPS) * hi):
        raise IllConditionedError(f"Re(u) within {DOMAIN_EPS:g} of the upper bound {hi}")
    if math.isfinite(lo) and np.any(re < (1 - DOMAIN_EPS) * lo):
        raise IllConditionedError(f"Re(u) within {DOMAIN_EPS:g} of the lower bound {lo}")


def _check_time(spec: AffineProcessSpec, t: float) -> None:
    if not 0 <= t <= spec.horizon * (1 + 1e-12):
        raise DomainError(f"time {t} outside [0, {spec.horizon}]")


def psi(spec: AffineProcessSpec, t: float, u):
    """State coefficient ``psi_t(u)`` of the exponent."""
    _check_time(spec, t)
    check_domain(spec, u)
    if spec.kind == BROWNIAN:
        return u * 1.0
    return math.exp(-spec.lam * t) * u


def _jump_phi(spec, t, u):
    # beta * log((alpha - e u)/(alpha - u)) written as log1p(u(1-e)/(alpha-u));
    # both factors lie in the right half plane so the principal branch is continuous
    one_minus_decay = -math.expm1(-spec.lam * t)
    out = 0.0
    if spec.beta_plus > 0:
        out = out + spec.beta_plus * np.log1p(u * one_minus_decay / (spec.alpha_plus - u))
    if spec.beta_minus > 0:
        out = out + spec.beta_minus * np.log1p(-u * one_minus_decay / (spec.alpha_minus + u))
    return out


def phi(spec: AffineProcessSpec, t: float, u):
    """Constant term ``phi_t(u)`` of the exponent."""
    _check_time(spec, t)
    check_domain(spec, u)
    return _phi_unchecked(spec, t, u)


def _phi_unchecked(spec, t, u):
    if spec.kind == BROWNIAN:
        return spec.drift * u * t + 0.5 * spec.sigma ** 2 * u * u * t
    lam = spec.lam
    out = spec.theta * u * (-math.expm1(-lam * t))
    if spec.sigma > 0:
        out = out + spec.sigma ** 2 * u * u * (-math.expm1(-2 * lam * t)) / (4 * lam)
    if spec.has_jumps:
        out = out + _jump_phi(spec, t, u)
    return out


def exponents(spec: AffineProcessSpec, t: float, u):
    """Return ``(phi_t(u), psi_t(u))`` after a single domain check."""
    _check_time(spec, t)
    check_domain(spec, u)
    ps = u * 1.0 if spec.kind == BROWNIAN else math.exp(-spec.lam * t) * u
    return _phi_unchecked(spec, t, u), ps


def mgf_conditional(spec: AffineProcessSpec, dt: float, u, x):
    """``E[exp(u X_{s+dt}) | X_s = x] = exp(phi_dt(u) + psi_dt(u) x)``."""
    ph, ps = exponents(spec, dt, u)
    return np.exp(ph + ps * x)


def mean(spec: AffineProcessSpec, t: float, x: float) -> float:
    """First moment ``E[X_t | X_0 = x]`` from the derivative of the exponent at 0."""
    if spec.kind == BROWNIAN:
        return x + spec.drift * t
    decay = math.exp(-spec.lam * t)
    m = spec.theta + (x - spec.theta) * decay
    if spec.has_jumps:
        m += (1 - decay) * (spec.beta_plus / spec.alpha_plus - spec.beta_minus / spec.alpha_minus)
    return m


def point_mass(spec: AffineProcessSpec, t: float, x: float) -> tuple[float, float] | None:
    """Atom ``(probability, location)`` of the law of ``X_t`` given ``X_0 = x``.

    Without a diffusion part the process is deterministic between jumps, so
    ``X_t`` sits at its no-jump value with the probability of seeing no jump.
    Returns ``None`` when the law is absolutely continuous.
    """
    if spec.sigma > 0 and t > 0:
        return None
    if spec.kind == BROWNIAN:
        return 1.0, x + spec.drift * t
    decay = math.exp(-spec.lam * t)
    loc = spec.theta + (x - spec.theta) * decay
    total_intensity = spec.lam * (spec.beta_plus + spec.beta_minus) if spec.has_jumps else 0.0
    return math.exp(-total_intensity * t), loc
