"""Robust geometric programming: uncertain GPs, tractable robust counterparts, and simulation."""

from .core import AffineData, GeometricProgram, Monomial, Posynomial, count_constraints, monomial, posynomial
from .formulations import (BEST_PAIRS, LINPERTS, METHODS, SIMPLE, TWO_TERM, conservativeness_audit, formulate,
                           robust_solve)
from .model import Parameter, SymbolicModel, Term
from .models import SyntheticSpec, build_wing, generate_synthetic, wing_model
from .partition import CategorizedProgram, categorize
from .program import Program, from_gp
from .pwl import build_pwl
from .simulate import SimulationReport, SweepResult, gamma_sweep, simulate
from .solver import SolveResult, Tolerances, solve
from .uncertainty import PerturbationSet, UncertainParameter, propagate_parameters

__version__ = "0.1.0"

__all__ = [
    "BEST_PAIRS", "LINPERTS", "METHODS", "SIMPLE", "TWO_TERM", "AffineData", "CategorizedProgram",
    "GeometricProgram", "Monomial", "Parameter", "PerturbationSet", "Posynomial", "Program", "SimulationReport",
    "SolveResult", "SweepResult", "SymbolicModel", "SyntheticSpec", "Term", "Tolerances", "UncertainParameter",
    "build_pwl", "build_wing", "categorize", "conservativeness_audit", "count_constraints", "formulate",
    "from_gp", "gamma_sweep", "generate_synthetic", "monomial", "posynomial", "propagate_parameters",
    "robust_solve", "simulate", "solve", "wing_model",
]
