"""Weil-algebra jet arithmetic and twisted differentials of joint invariants."""
from .expr import parse, evaluate, partial_derivative, render
from .jets import (
    NearPoint,
    TwistSpec,
    lambda_constant,
    prolong,
    singular_twisted_quotient,
    total_derivative,
    twisted_differential,
    universal_jet,
)
from .weil import WeilElement, WeilSpec, singular_divide, weil_invert

__all__ = [
    "NearPoint",
    "TwistSpec",
    "WeilElement",
    "WeilSpec",
    "evaluate",
    "lambda_constant",
    "parse",
    "partial_derivative",
    "prolong",
    "render",
    "singular_divide",
    "singular_twisted_quotient",
    "total_derivative",
    "twisted_differential",
    "universal_jet",
    "weil_invert",
]
__version__ = "0.1.0"
