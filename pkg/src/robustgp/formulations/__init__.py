"""Robust formulations of uncertain geometric programs."""

from .best_pairs import (DescentResult, best_pairs, best_pairs_formulation, count_pairings, min_weight_matching,
                         random_pairing)
from .common import BEST_PAIRS, LINPERTS, METHODS, SIMPLE, TWO_TERM, RobustProgram, method_name
from .decoupled import simple_conservative, two_term_formulation
from .driver import AuditReport, MethodResult, conservativeness_audit, formulate, robust_solve
from .linperts import HalfSpace, build_half_space, linearized_perturbations

__all__ = [
    "BEST_PAIRS", "LINPERTS", "METHODS", "SIMPLE", "TWO_TERM", "AuditReport", "DescentResult", "HalfSpace",
    "MethodResult", "RobustProgram", "best_pairs", "best_pairs_formulation", "build_half_space",
    "conservativeness_audit", "count_pairings", "formulate", "linearized_perturbations", "method_name",
    "min_weight_matching", "random_pairing", "robust_solve", "simple_conservative", "two_term_formulation",
]
