"""TOML market configuration: process, tenor, curve and command settings.

Schema (unknown keys are rejected)::

    [process]     kind = "jump_ou" | "brownian", process parameters, optional horizon
    [tenor]       dates = [...]  or  step, count, optional start
    [curve]       flat_rate, period  or  discounts = [[t, P(0, t)], ...]
    [calibration] u_override = [...]            (optional, fault injection)
    [surface]     kind, maturities/strikes or expiries/tenors
    [montecarlo]  paths, seed, antithetic
    [validate]    instrument lists and tolerances

The process horizon defaults to the last tenor date. Flat curves use simple
compounding per period: ``P(0, t) = (1 + r * period)^(-t / period)``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .affine import BROWNIAN, JUMP_OU, AffineProcessSpec
from .errors import ConfigError
from .model import DiscountCurve, TenorStructure

PRESETS = ("fig1", "fig2", "fig3", "brownian")

_PROCESS_KEYS = {
    BROWNIAN: {"kind", "horizon", "sigma", "drift", "x0"},
    JUMP_OU: {"kind", "horizon", "lam", "alpha_plus", "alpha_minus", "beta_plus",
              "beta_minus", "sigma", "theta", "x0"},
}
_SECTIONS = {"process", "tenor", "curve", "calibration", "surface", "montecarlo", "validate"}
_SURFACE_KEYS = {"kind", "maturities", "strikes", "expiries", "tenors"}
_MC_DEFAULTS = {"paths": 1_000_000, "seed": 20240601, "antithetic": False}
_VALIDATE_DEFAULTS = {
    "strikes": [0.02, 0.035, 0.05, 0.07],
    "floorlets": [2],
    "swaptions": [],
    "swaption_strikes": [0.035],
    "closed_form_rtol": 1e-8,
    "mc_sigmas": 3.0,
    "parity_atol": 1e-10,
    "calibration_rtol": 1e-12,
}


@dataclass(frozen=True)
class MarketConfig:
    spec: AffineProcessSpec
    tenor: TenorStructure
    curve: DiscountCurve
    compounding: str
    u_override: tuple[float, ...] | None = None
    surface: dict[str, Any] = field(default_factory=dict)
    montecarlo: dict[str, Any] = field(default_factory=dict)
    validate: dict[str, Any] = field(default_factory=dict)


def _reject_unknown(section: str, table: dict, allowed: set) -> None:
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"[{section}]: unknown key(s) {', '.join(extra)}; allowed: {', '.join(sorted(allowed))}")


def _number(section: str, table: dict, key: str, default=None, *, positive=False, nonneg=False) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}].{key} is required")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"[{section}].{key} must be a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"[{section}].{key} must be > 0, got {value}")
    if nonneg and value < 0:
        raise ConfigError(f"[{section}].{key} must be >= 0, got {value}")
    return float(value)


def _number_list(section: str, table: dict, key: str, default=None) -> list[float]:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}].{key} is required")
        return list(default)
    value = table[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"[{section}].{key} must be a non-empty list")
    return [_number(section, {key: v}, key) for v in value]


def _parse_tenor(table: dict) -> TenorStructure:
    if "dates" in table:
        _reject_unknown("tenor", table, {"dates"})
        dates = _number_list("tenor", table, "dates")
        try:
            return TenorStructure(tuple(dates))
        except ValueError as exc:
            raise ConfigError(f"[tenor].dates: {exc}") from None
    _reject_unknown("tenor", table, {"step", "count", "start"})
    step = _number("tenor", table, "step", positive=True)
    count = table.get("count")
    if not isinstance(count, int) or isinstance(count, bool) or count < 2:
        raise ConfigError("[tenor].count must be an integer >= 2")
    start = _number("tenor", table, "start", step, positive=True)
    return TenorStructure.regular(step, count, start=start)


def _parse_curve(table: dict, tenor: TenorStructure) -> tuple[DiscountCurve, str]:
    try:
        if "discounts" in table:
            _reject_unknown("curve", table, {"discounts"})
            points = table["discounts"]
            if not isinstance(points, list) or any(not isinstance(p, list) or len(p) != 2 for p in points):
                raise ConfigError("[curve].discounts must be a list of [maturity, discount] pairs")
            lookup = {}
            for t, p in points:
                lookup[round(_number("curve", {"t": t}, "t"), 9)] = _number("curve", {"p": p}, "p")
            missing = [d for d in tenor.dates if round(d, 9) not in lookup]
            if missing:
                raise ConfigError(f"[curve].discounts has no value for tenor date(s) {missing}")
            return DiscountCurve(tuple(lookup[round(d, 9)] for d in tenor.dates)), "discount factors"
        _reject_unknown("curve", table, {"flat_rate", "period"})
        rate = _number("curve", table, "flat_rate", nonneg=True)
        period = _number("curve", table, "period", positive=True)
        return (DiscountCurve.flat(tenor, rate, period),
                f"flat {rate:g}, simple compounding per {period:g} years")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[curve]: {exc}") from None


def _parse_process(table: dict, horizon: float) -> AffineProcessSpec:
    kind = table.get("kind")
    if kind not in _PROCESS_KEYS:
        raise ConfigError(f"[process].kind must be one of {sorted(_PROCESS_KEYS)}, got {kind!r}")
    _reject_unknown("process", table, _PROCESS_KEYS[kind])
    h = _number("process", table, "horizon", horizon, positive=True)
    if not math.isclose(h, horizon, rel_tol=1e-12):
        raise ConfigError(f"[process].horizon {h} differs from the last tenor date {horizon}")
    x0 = _number("process", table, "x0", 0.0)
    try:
        if kind == BROWNIAN:
            return AffineProcessSpec.brownian(sigma=_number("process", table, "sigma", 1.0, nonneg=True),
                                              drift=_number("process", table, "drift", 0.0),
                                              x0=x0, horizon=horizon)
        return AffineProcessSpec.jump_ou(
            lam=_number("process", table, "lam", positive=True),
            alpha_plus=_number("process", table, "alpha_plus", positive=True),
            alpha_minus=_number("process", table, "alpha_minus", positive=True),
            beta_plus=_number("process", table, "beta_plus", nonneg=True),
            beta_minus=_number("process", table, "beta_minus", nonneg=True),
            sigma=_number("process", table, "sigma", 0.0, nonneg=True),
            theta=_number("process", table, "theta", 0.0),
            x0=x0, horizon=horizon)
    except ValueError as exc:
        raise ConfigError(f"[process]: {exc}") from None


def _parse_section_defaults(name: str, table: dict, defaults: dict) -> dict:
    _reject_unknown(name, table, set(defaults))
    out = dict(defaults)
    out.update(table)
    return out


def _parse_validate(table: dict) -> dict:
    out = _parse_section_defaults("validate", table, _VALIDATE_DEFAULTS)
    for key in ("strikes", "swaption_strikes"):
        out[key] = _number_list("validate", out, key) if out[key] else []
    for key in ("closed_form_rtol", "mc_sigmas", "parity_atol", "calibration_rtol"):
        out[key] = _number("validate", out, key, positive=True)
    if any(not isinstance(k, int) or isinstance(k, bool) for k in out["floorlets"]):
        raise ConfigError("[validate].floorlets must be a list of forward indices")
    if any(not (isinstance(p, list) and len(p) == 2 and all(isinstance(i, int) for i in p))
           for p in out["swaptions"]):
        raise ConfigError("[validate].swaptions must be a list of [alpha, beta] index pairs")
    out["swaptions"] = [tuple(p) for p in out["swaptions"]]
    return out


def _parse_montecarlo(table: dict) -> dict:
    out = _parse_section_defaults("montecarlo", table, _MC_DEFAULTS)
    if not isinstance(out["paths"], int) or isinstance(out["paths"], bool) or out["paths"] < 2:
        raise ConfigError("[montecarlo].paths must be an integer >= 2")
    if not isinstance(out["seed"], int) or isinstance(out["seed"], bool) or not 0 <= out["seed"] < 2**64:
        raise ConfigError("[montecarlo].seed must be an unsigned 64-bit integer")
    if not isinstance(out["antithetic"], bool):
        raise ConfigError("[montecarlo].antithetic must be true or false")
    return out


def _parse_surface(table: dict) -> dict:
    _reject_unknown("surface", table, _SURFACE_KEYS)
    out = dict(table)
    kind = out.get("kind", "caplet")
    if kind not in ("caplet", "swaption-atm"):
        raise ConfigError(f"[surface].kind must be 'caplet' or 'swaption-atm', got {kind!r}")
    out["kind"] = kind
    for key in ("maturities", "strikes", "expiries", "tenors"):
        if key in out:
            out[key] = _number_list("surface", out, key)
    return out


def parse_market_config(doc: dict) -> MarketConfig:
    """Validate a parsed TOML document."""
    _reject_unknown("top level", doc, _SECTIONS)
    for name in ("process", "tenor", "curve"):
        if name not in doc:
            raise ConfigError(f"missing [{name}] section")
    for name, table in doc.items():
        if not isinstance(table, dict):
            raise ConfigError(f"[{name}] must be a table")
    tenor = _parse_tenor(doc["tenor"])
    spec = _parse_process(doc["process"], tenor.horizon)
    curve, compounding = _parse_curve(doc["curve"], tenor)
    u_override = None
    calib = doc.get("calibration", {})
    _reject_unknown("calibration", calib, {"u_override"})
    if "u_override" in calib:
        u_override = tuple(_number_list("calibration", calib, "u_override"))
        if len(u_override) != tenor.n:
            raise ConfigError(f"[calibration].u_override needs {tenor.n} values, got {len(u_override)}")
    return MarketConfig(spec=spec, tenor=tenor, curve=curve, compounding=compounding,
                        u_override=u_override,
                        surface=_parse_surface(doc.get("surface", {})),
                        montecarlo=_parse_montecarlo(doc.get("montecarlo", {})),
                        validate=_parse_validate(doc.get("validate", {})))


def load_market_config(text: str) -> MarketConfig:
    """Parse TOML text into a validated :class:`MarketConfig`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML: {exc}") from None
    return parse_market_config(doc)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("coshlibor.presets").joinpath(f"{name}.toml").read_text(encoding="utf-8")


def load_preset(name: str) -> MarketConfig:
    return load_market_config(preset_text(name))


def load_config_file(path: str | Path) -> MarketConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return load_market_config(text)
