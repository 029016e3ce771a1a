"""Eta-quotients on Gamma_0(N), maximal vanishing forms and plane models of X_0(N)."""

__version__ = "0.1.0"

from .numth import Cusp, Gamma0Profile, cusps, divisors, profile, psi
from .qseries import QSeries
from .etaquot import EtaQuotient, certify, divisor, order_matrix, parse_expression
from .maxvanish import classify, closed_form, solve_max_vanish
from .planemodel import (
    FormTriple,
    ModelReport,
    PlanePolynomial,
    conic_triple,
    find_curve,
    gcd_birationality_check,
    min_divisor_sum,
    model_report,
    pole_degree,
    standard_triple,
)

__all__ = [
    "Cusp", "Gamma0Profile", "cusps", "divisors", "profile", "psi", "QSeries",
    "EtaQuotient", "certify", "divisor", "order_matrix", "parse_expression",
    "classify", "closed_form", "solve_max_vanish",
    "FormTriple", "ModelReport", "PlanePolynomial", "conic_triple", "find_curve",
    "gcd_birationality_check", "min_divisor_sum", "model_report", "pole_degree", "standard_triple",
]
