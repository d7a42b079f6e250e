"""Exact-law Monte Carlo for the driving process and brute-force option prices.

The terminal-measure law of ``X_t`` is sampled exactly: a Gaussian OU part
plus, per jump sign, a Poisson number of exponential jumps that have decayed
by ``exp(-lam (t - tau))`` since their uniform arrival time ``tau``.

Random numbers come from counter-based Philox streams, one per block of
``BLOCK_SIZE`` paths, keyed by ``(seed, block index)``. A block's draws depend
only on those two numbers, so estimates do not depend on how blocks are
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .affine import BROWNIAN, AffineProcessSpec
from .fourier import _floorlet_terms, _swaption_terms
from .model import CalibratedModel
from .unimodal import _check_strict, _check_swaption

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class SimulationPlan:
    n_paths: int
    seed: int
    expiry: float | None = None
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError("n_paths must be at least 2")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic sampling needs an even number of paths")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_paths: int
    n_exercised: int = 0


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _jump_sum(rng, n, intensity, rate, t, lam):
    counts = rng.poisson(intensity * t, size=n)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(n)
    sizes = rng.exponential(1.0 / rate, size=total)
    ages = t * rng.random(total)  # t - tau is uniform too
    return _kernels.sum_by_path(counts, sizes * np.exp(-lam * ages))


def _sample_block(spec: AffineProcessSpec, t: float, n: int, rng, antithetic: bool):
    if antithetic:
        half = rng.standard_normal(n // 2)
        z = np.concatenate([half, -half])
    else:
        z = rng.standard_normal(n)
    if spec.kind == BROWNIAN:
        return spec.x0 + spec.drift * t + spec.sigma * math.sqrt(t) * z
    lam = spec.lam
    decay = math.exp(-lam * t)
    x = spec.theta + (spec.x0 - spec.theta) * decay
    if spec.sigma > 0:
        x = x + spec.sigma * math.sqrt(-math.expm1(-2 * lam * t) / (2 * lam)) * z
    else:
        x = np.full(n, x)
    if spec.beta_plus > 0:
        x = x + _jump_sum(rng, n, lam * spec.beta_plus, spec.alpha_plus, t, lam)
    if spec.beta_minus > 0:
        x = x - _jump_sum(rng, n, lam * spec.beta_minus, spec.alpha_minus, t, lam)
    return x


def _blocks(plan: SimulationPlan):
    start = 0
    block = 0
    while start < plan.n_paths:
        size = min(BLOCK_SIZE, plan.n_paths - start)
        yield block, size
        start += size
        block += 1


def sample_terminal(spec: AffineProcessSpec, expiry: float, plan: SimulationPlan) -> np.ndarray:
    """``plan.n_paths`` exact draws of ``X_expiry`` given ``X_0 = spec.x0``.

    With ``plan.antithetic`` the Gaussian draws come in ``(z, -z)`` pairs
    inside each block; the jump parts are not paired.
    """
    if expiry < 0:
        raise ValueError("expiry must be nonnegative")
    if expiry == 0:
        return np.full(plan.n_paths, float(spec.x0))
    parts = [_sample_block(spec, expiry, size, _block_rng(plan.seed, block), plan.antithetic)
             for block, size in _blocks(plan)]
    return np.concatenate(parts)


def _estimate(samples: np.ndarray, antithetic: bool) -> tuple[float, float]:
    # antithetic pairs sit in the two halves of each block
    if antithetic:
        paired = []
        start = 0
        for _, size in _blocks(SimulationPlan(samples.size, 0)):
            chunk = samples[start:start + size]
            paired.append(0.5 * (chunk[: size // 2] + chunk[size // 2:]))
            start += size
        samples = np.concatenate(paired)
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(samples.size))


def _price(model: CalibratedModel, expiry: float, coef, expo, plan: SimulationPlan) -> McEstimate:
    x = sample_terminal(model.spec, expiry, plan)
    payoff = _kernels.positive_part(x, coef, expo)
    value, se = _estimate(payoff, plan.antithetic)
    p_T = model.curve.discounts[-1]
    return McEstimate(p_T * value, p_T * se, plan.n_paths, int(np.count_nonzero(payoff)))


def mc_floorlet(model: CalibratedModel, k: int, strike: float, plan: SimulationPlan) -> McEstimate:
    """Floorlet on ``F^k``: ``P(0,T) E[(K~ M^{u_k} - M^{u_{k-1}})^+]`` at the fixing date."""
    if not 2 <= k <= model.n + 1:
        raise IndexError(f"forward index {k} outside 2..{model.n + 1}")
    _check_strict(model, k - 1, k)
    coef, expo = _floorlet_terms(model, k, strike)
    return _price(model, model.tenor.date(k - 1), coef, expo, plan)


def mc_put_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float,
                    plan: SimulationPlan) -> McEstimate:
    """Put swaption ``P(0,T) E[(M^{u_beta} - M^{u_alpha} + K sum Delta_k M^{u_k})^+]`` at ``T_alpha``."""
    _check_swaption(model, alpha, beta, strike)
    coef, expo = _swaption_terms(model, alpha, beta, strike)
    return _price(model, model.tenor.date(alpha), coef, expo, plan)


def mc_caplet(model: CalibratedModel, k: int, strike: float, plan: SimulationPlan) -> McEstimate:
    """Caplet priced directly from ``(M^{u_{k-1}} - K~ M^{u_k})^+``, without parity."""
    if not 2 <= k <= model.n + 1:
        raise IndexError(f"forward index {k} outside 2..{model.n + 1}")
    coef, expo = _floorlet_terms(model, k, strike)
    return _price(model, model.tenor.date(k - 1), -coef, expo, plan)


def mc_payer_swaption(model: CalibratedModel, alpha: int, beta: int, strike: float,
                      plan: SimulationPlan) -> McEstimate:
    """Payer swaption priced directly from the negated receiver payoff."""
    _check_swaption(model, alpha, beta, strike)
    coef, expo = _swaption_terms(model, alpha, beta, strike)
    return _price(model, model.tenor.date(alpha), -coef, expo, plan)
