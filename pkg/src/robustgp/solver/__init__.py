"""Interior-point solution of log-space convex programs, signomial programs and fixed-design re-solves."""

from .fixed import FixedDesignSolver, fix_and_solve
from .ipm import (INFEASIBLE, MAX_ITER, NUMERICAL_FAILURE, OPTIMAL, Compiled, SolveResult, Tolerances,
                  solve_convex)
from .signomial import condense, solve, solve_signomial

__all__ = [
    "INFEASIBLE", "MAX_ITER", "NUMERICAL_FAILURE", "OPTIMAL", "Compiled", "FixedDesignSolver",
    "SolveResult", "Tolerances", "condense", "fix_and_solve", "solve", "solve_convex", "solve_signomial",
]
