"""Lorentzian surfaces 2dxdy + f(x)dy^2 with a Killing field: profile
analysis, extensions, quotient census, classification of tori and Klein
bottles, component indices and geodesics.

Submodules: expr, fnprofile, extension, isogroup, classify, components,
geodesics, cli.
"""

from .errors import (ConfigError, DegenerateZero, EvaluationError, ExprSyntaxError, InvalidRow, LksError,
                     ProfileError, UnknownIdentifier, ZeroPlateau)
from .fnprofile import FunctionProfile, Interval, Periodic, load_profile

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DegenerateZero", "EvaluationError", "ExprSyntaxError", "InvalidRow", "LksError",
    "ProfileError", "UnknownIdentifier", "ZeroPlateau",
    "FunctionProfile", "Interval", "Periodic", "load_profile", "__version__",
]
