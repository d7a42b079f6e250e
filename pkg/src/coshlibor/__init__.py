"""LIBOR market model driven by cosh martingales of a one-dimensional affine process.

Bond prices relative to the horizon bond are ``M_t^u(X_t) = E[cosh(u X_T) | X_t]``.
Caplets, floorlets and swaptions are priced by Fourier inversion, with a
closed form for Brownian drivers and exact Monte Carlo as oracles.
"""

from .affine import AffineProcessSpec
from .errors import (CalibrationError, ConfigError, CoshLiborError, DomainError,
                     IllConditionedError, IntegrationError, NumericalError, PreconditionError)
from .fourier import (PricingResult, price_caplet, price_floorlet, price_payer_swaption,
                      price_put_swaption)
from .model import CalibratedModel, DiscountCurve, TenorStructure, calibrate

__all__ = [
    "AffineProcessSpec", "CalibratedModel", "CalibrationError", "ConfigError",
    "CoshLiborError", "DiscountCurve", "DomainError", "IllConditionedError",
    "IntegrationError", "NumericalError", "PreconditionError", "PricingResult",
    "TenorStructure", "calibrate", "price_caplet", "price_floorlet",
    "price_payer_swaption", "price_put_swaption",
]
