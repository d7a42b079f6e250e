"""Command line entry point: ``coshlibor {calibrate,price,surface,validate}``.

Exit codes:

====  ==========================================================
0     success
1     ``validate`` ran and at least one check failed
2     bad command line (argparse)
3     configuration error
4     calibration infeasible
5     instrument or model precondition violated (incl. domain)
6     numerical failure (bracketing, quadrature)
7     output could not be written
====  ==========================================================
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import PRESETS, MarketConfig, load_config_file, load_preset
from .errors import (CalibrationError, ConfigError, DomainError, NumericalError,
                     PreconditionError)
from .fourier import (price_caplet, price_floorlet, price_payer_swaption,
                      price_put_swaption)
from .reporting import surface_csv, to_json
from .validation import build_model, run_validate
from .volsurface import build_caplet_surface, build_swaption_atm_grid

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_CALIBRATION = 4
EXIT_PRECONDITION = 5
EXIT_NUMERICAL = 6
EXIT_OUTPUT = 7

ANNUITY_CONVENTION = "caplet: Delta_k P(0, T_k); swaption: sum Delta_k P(0, T_k)"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coshlibor", description="Cosh-martingale LIBOR model tools")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="TOML market configuration")
        src.add_argument("--preset", choices=PRESETS, help="built-in configuration")
        sp.add_argument("--out", type=Path, help="output file (default: stdout)")

    common(sub.add_parser("calibrate", help="fit the u-sequence to the curve"))
    pr = sub.add_parser("price", help="price one instrument")
    common(pr)
    pr.add_argument("--instrument", required=True, choices=("caplet", "floorlet", "payer", "receiver"))
    pr.add_argument("--k", type=int, help="forward index (caplet/floorlet)")
    pr.add_argument("--alpha", type=int, help="swap start index")
    pr.add_argument("--beta", type=int, help="swap end index")
    pr.add_argument("--strike", type=float, required=True)
    sf = sub.add_parser("surface", help="implied-vol surface as CSV")
    common(sf)
    sf.add_argument("--kind", choices=("caplet", "swaption-atm"),
                    help="defaults to [surface].kind of the config")
    common(sub.add_parser("validate", help="run the oracle and parity checks"))
    return p


def _load(args) -> MarketConfig:
    return load_preset(args.preset) if args.preset else load_config_file(args.config)


def _model_meta(config: MarketConfig, model) -> dict:
    return {"compounding": config.compounding, "tenor": list(model.tenor.dates),
            "process": {k: v for k, v in vars(config.spec).items()}}


def _cmd_calibrate(args, config):
    model = build_model(config)
    doc = {"u": list(model.u), "residuals": list(model.residuals),
           "discounts": list(model.curve.discounts), **_model_meta(config, model)}
    return to_json(doc), EXIT_OK


def _cmd_price(args, config):
    model = build_model(config)
    if args.instrument in ("caplet", "floorlet"):
        if args.k is None:
            raise ConfigError("--k is required for caplets and floorlets")
        fn = price_caplet if args.instrument == "caplet" else price_floorlet
        res = fn(model, args.k, args.strike)
        where = {"k": args.k}
    else:
        if args.alpha is None or args.beta is None:
            raise ConfigError("--alpha and --beta are required for swaptions")
        fn = price_payer_swaption if args.instrument == "payer" else price_put_swaption
        res = fn(model, args.alpha, args.beta, args.strike)
        where = {"alpha": args.alpha, "beta": args.beta}
    doc = {"instrument": args.instrument, "strike": args.strike, **where,
           "price": res.price, "kappa": [res.kappa.kappa1, res.kappa.kappa2],
           "kappa_degenerate": res.kappa.degenerate, "dampening": res.dampening,
           "integral_error_estimate": res.integral_error_estimate,
           "truncation_bound": res.truncation_bound, "compounding": config.compounding}
    return to_json(doc), EXIT_OK


def _cmd_surface(args, config):
    model = build_model(config)
    s = config.surface
    kind = args.kind or s.get("kind", "caplet")
    try:
        if kind == "caplet":
            grid = build_caplet_surface(model, s["maturities"], s["strikes"])
        else:
            grid = build_swaption_atm_grid(model, s["expiries"], s["tenors"])
    except KeyError as exc:
        raise ConfigError(f"[surface].{exc.args[0]} is required for a {kind} surface") from None
    except ValueError as exc:
        if isinstance(exc, (ConfigError, PreconditionError, DomainError)):
            raise
        raise ConfigError(f"[surface]: {exc}") from None
    if args.out is not None:
        meta = {"kind": kind, "compounding": config.compounding,
                "annuity_convention": ANNUITY_CONVENTION,
                "flags": {"#ZTV": "zero time value", "#NOSOL": "no solution",
                          "#NA": "swap ends after the horizon"}}
        _write(args.out.with_name(args.out.name + ".meta.json"), to_json(meta))
    return surface_csv(grid), EXIT_OK


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def _cmd_validate(args, config):
    report = run_validate(config)
    return to_json(report), EXIT_OK if report["passed"] else EXIT_VALIDATION_FAILED


COMMANDS = {"calibrate": _cmd_calibrate, "price": _cmd_price, "surface": _cmd_surface,
            "validate": _cmd_validate}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = _load(args)
        text, code = COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (PreconditionError, DomainError, IndexError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    if args.out is None:
        sys.stdout.write(text)
    else:
        try:
            _write(args.out, text)
        except OSError as exc:
            print(f"cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_OUTPUT
    if code == EXIT_VALIDATION_FAILED:
        failed = json.loads(text)["failed"]
        more = f" (+{len(failed) - 10} more)" if len(failed) > 10 else ""
        print("validation failed: " + ", ".join(failed[:10]) + more, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
