"""Numerical laboratory for Visser-type coefficient inequalities on the unit circle."""

from .circle_norms import NormResult, QuadratureConfig, norm_inf, norm_p, norm_zero, two_term_norm
from .poly_core import GammaVector, Polynomial, RootForm, dilate, from_roots, reverse_conjugate
from .visser_checks import InequalityReport
from .zero_location import certify_zero_free, roots

__version__ = "0.1.0"

__all__ = [
    "GammaVector", "InequalityReport", "NormResult", "Polynomial", "QuadratureConfig",
    "RootForm", "certify_zero_free", "dilate", "from_roots", "norm_inf", "norm_p",
    "norm_zero", "reverse_conjugate", "roots", "two_term_norm",
]
