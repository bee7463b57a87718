"""Positive Ricci curvature on quotients (G x C^k)/Phi_m(R) of nilpotent groups:
curvature formulas, exact positivity certificates and verification oracles."""

from .nilalg import NilpotentAlgebra, catalog_algebra, load_algebra, validate
from .profile import alphas
from .quotient import base_ricci, certify_positivity, min_k, scan
from .totalspace import SubmersionParams, find_k0, total_ricci

__all__ = [
    "NilpotentAlgebra", "SubmersionParams", "alphas", "base_ricci", "catalog_algebra", "certify_positivity",
    "find_k0", "load_algebra", "min_k", "scan", "total_ricci", "validate",
]
__version__ = "0.1.0"
