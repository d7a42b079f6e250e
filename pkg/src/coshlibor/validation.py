"""The ``validate`` command: oracle comparisons, parity and calibration round trip."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .affine import AffineProcessSpec
from .brownian import cf_floorlet, cf_put_swaption
from .config import MarketConfig
from .errors import CoshLiborError
from .fourier import (annuity, price_caplet, price_floorlet, price_payer_swaption,
                      price_put_swaption)
from .model import CalibratedModel, calibrate, initial_normalized_bond
from .montecarlo import (SimulationPlan, mc_caplet, mc_floorlet, mc_payer_swaption,
                         mc_put_swaption)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    reference: float
    tolerance: float
    passed: bool
    note: str = ""
    skipped: bool = False

    def as_dict(self):
        return {"name": self.name, "value": self.value, "reference": self.reference,
                "tolerance": self.tolerance, "passed": self.passed, "skipped": self.skipped,
                "note": self.note}


def build_model(config: MarketConfig) -> CalibratedModel:
    """Calibrate, then apply ``u_override`` if the config carries one."""
    model = calibrate(config.spec, config.tenor, config.curve)
    if config.u_override is not None:
        us = config.u_override
        residuals = tuple(initial_normalized_bond(config.spec, u) / config.curve.normalized(k) - 1.0
                          for k, u in enumerate(us, start=1))
        model = replace(model, u=us, residuals=residuals)
    return model


def _abs_check(name, value, reference, tol):
    return Check(name, value, reference, tol, abs(value - reference) <= tol)


def _rel_check(name, value, reference, rtol):
    scale = max(abs(reference), 1e-300)
    return Check(name, value, reference, rtol, abs(value - reference) <= rtol * scale,
                 "relative")


def _guard(name, fn):
    try:
        return fn()
    except CoshLiborError as exc:
        return [Check(name, math.nan, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}")]


def calibration_checks(model: CalibratedModel, rtol: float) -> list[Check]:
    out = []
    for k in range(1, model.n + 1):
        value = initial_normalized_bond(model.spec, model.u_at(k))
        out.append(_rel_check(f"calibration/bond{k}", value, model.curve.normalized(k), rtol))
    us = [model.u_at(k) for k in range(1, model.n + 1)]
    decreasing = all(a > b for a, b in zip(us, us[1:]))
    out.append(Check("calibration/u-strictly-decreasing", float(decreasing), 1.0, 0.0, decreasing))
    return out


def _brownian_companion(config: MarketConfig) -> tuple[CalibratedModel, str]:
    spec = config.spec
    if spec.kind == "brownian" and spec.x0 == 0.0 and spec.drift == 0.0 and spec.sigma > 0:
        return build_model(config), "configured process"
    companion = AffineProcessSpec.brownian(sigma=1.0, horizon=config.tenor.horizon)
    return calibrate(companion, config.tenor, config.curve), "companion Brownian model (sigma=1)"


def closed_form_checks(config: MarketConfig) -> list[Check]:
    v = config.validate
    model, label = _brownian_companion(config)
    out = []
    for k in v["floorlets"]:
        for K in v["strikes"]:
            name = f"closed-form/floorlet k={k} K={K:g}"
            out += _guard(name, lambda: [_rel_check(name, price_floorlet(model, k, K).price,
                                                    cf_floorlet(model, k, K), v["closed_form_rtol"])])
    for a, b in v["swaptions"]:
        for K in v["swaption_strikes"]:
            name = f"closed-form/put-swaption {a}-{b} K={K:g}"
            out += _guard(name, lambda: [_rel_check(name, price_put_swaption(model, a, b, K).price,
                                                    cf_put_swaption(model, a, b, K),
                                                    v["closed_form_rtol"])])
    return [replace(c, note=(c.note + "; " if c.note else "") + label) for c in out]


# below this many exercised paths the standard error itself is unreliable
MIN_EXERCISED = 30


def _mc_check(name, fourier, est, sigmas):
    tol = max(sigmas * est.std_error, 1e-14)
    note = f"MC std error {est.std_error:.3e}, {est.n_exercised} exercised paths"
    if est.n_exercised < MIN_EXERCISED:
        return Check(name, fourier, est.value, tol, False,
                     note + f" (< {MIN_EXERCISED}: normal approximation not valid)", skipped=True)
    return Check(name, fourier, est.value, tol, abs(fourier - est.value) <= tol, note)


def monte_carlo_checks(config: MarketConfig, model: CalibratedModel) -> list[Check]:
    v = config.validate
    mc = config.montecarlo
    plan = SimulationPlan(mc["paths"], mc["seed"], antithetic=mc["antithetic"])
    sig = v["mc_sigmas"]
    out = []
    for k in v["floorlets"]:
        for K in v["strikes"]:
            name = f"monte-carlo/floorlet k={k} K={K:g}"
            out += _guard(name, lambda: [_mc_check(name, price_floorlet(model, k, K).price,
                                                   mc_floorlet(model, k, K, plan), sig)])
            name = f"monte-carlo/caplet k={k} K={K:g}"
            out += _guard(name, lambda: [_mc_check(name, price_caplet(model, k, K).price,
                                                   mc_caplet(model, k, K, plan), sig)])
    for a, b in v["swaptions"]:
        for K in v["swaption_strikes"]:
            name = f"monte-carlo/put-swaption {a}-{b} K={K:g}"
            out += _guard(name, lambda: [_mc_check(name, price_put_swaption(model, a, b, K).price,
                                                   mc_put_swaption(model, a, b, K, plan), sig)])
            name = f"monte-carlo/payer-swaption {a}-{b} K={K:g}"
            out += _guard(name, lambda: [_mc_check(name, price_payer_swaption(model, a, b, K).price,
                                                   mc_payer_swaption(model, a, b, K, plan), sig)])
    return out


def parity_checks(config: MarketConfig, model: CalibratedModel) -> list[Check]:
    v = config.validate
    tol = v["parity_atol"]
    out = []
    for k in v["floorlets"]:
        for K in v["strikes"]:
            name = f"parity/caplet-floorlet k={k} K={K:g}"

            def cap_floor():
                cpl = price_caplet(model, k, K).price
                flt = price_floorlet(model, k, K).price
                level = 1.0 + model.tenor.accrual(k) * K
                combo = model.discount(k - 1) - level * model.discount(k)
                return [_abs_check(name, cpl - flt, combo, tol),
                        Check(f"nonnegative/caplet k={k} K={K:g}", cpl, 0.0, tol, cpl >= -tol)]
            out += _guard(name, cap_floor)
    for a, b in v["swaptions"]:
        for K in v["swaption_strikes"]:
            name = f"parity/payer-receiver {a}-{b} K={K:g}"

            def pay_rec():
                pay = price_payer_swaption(model, a, b, K).price
                rec = price_put_swaption(model, a, b, K).price
                combo = model.discount(a) - model.discount(b) - K * annuity(model, a, b)
                return [_abs_check(name, pay - rec, combo, tol),
                        Check(f"nonnegative/payer {a}-{b} K={K:g}", pay, 0.0, tol, pay >= -tol)]
            out += _guard(name, pay_rec)
    return out


def run_validate(config: MarketConfig) -> dict:
    """Run every check; ``passed`` is true when no check that was run failed."""
    v = config.validate
    checks = []
    try:
        model = build_model(config)
    except CoshLiborError as exc:
        model = None
        checks.append(Check("calibration/fit", math.nan, math.nan, math.nan, False,
                            f"{type(exc).__name__}: {exc}"))
    if model is not None:
        checks += calibration_checks(model, v["calibration_rtol"])
    checks += closed_form_checks(config)
    if model is not None:
        checks += parity_checks(config, model)
        checks += monte_carlo_checks(config, model)
    failed = [c.name for c in checks if not (c.passed or c.skipped)]
    return {
        "passed": not failed,
        "failed": failed,
        "skipped": [c.name for c in checks if c.skipped],
        "n_checks": len(checks),
        "checks": [c.as_dict() for c in checks],
        "metadata": {
            "compounding": config.compounding,
            "montecarlo": dict(config.montecarlo),
            "u_override": config.u_override is not None,
        },
    }
