"""Sharp constants, maximisers and stability for the ball extension estimate on spheres."""

from .bessel import Order, ZeroTable, eval_J, jv, nth_zero, zeros_up_to
from .coefficients import SphereDim, lambda_closed, lambda_quadrature, lambda_values, truncation_index
from .sharp_constant import AmbiguousAtZero, CaseTag, ZeroHint, certified_max, classify_case, sharp_constant, verify_chains
from .stability import HarmonicMixture, deficit, j_frak, stability_constant, verify_sandwich

__version__ = "0.1.0"

__all__ = [
    "AmbiguousAtZero",
    "CaseTag",
    "HarmonicMixture",
    "Order",
    "SphereDim",
    "ZeroHint",
    "ZeroTable",
    "certified_max",
    "classify_case",
    "deficit",
    "eval_J",
    "j_frak",
    "jv",
    "lambda_closed",
    "lambda_quadrature",
    "lambda_values",
    "nth_zero",
    "sharp_constant",
    "stability_constant",
    "truncation_index",
    "verify_chains",
    "verify_sandwich",
    "zeros_up_to",
]
