"""Re-solve a GP for its free variables with design variables held fixed."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..core import GeometricProgram, normalize
from .ipm import Compiled, SolveResult, Tolerances, solve_compiled


class FixedDesignSolver:
    """Precompiled residual program; only log coefficients change per realization.

    ``fixed`` maps variable index to its log-space value.  Programs with
    exponent uncertainty are recompiled per call.
    """

    def __init__(self, gp: GeometricProgram, fixed: Mapping[int, float], tol: Tolerances | None = None):
        self.gp = normalize(gp)
        self.fixed = {int(j): float(v) for j, v in fixed.items()}
        self.tol = tol or Tolerances()
        n = self.gp.num_vars
        self.free = [j for j in range(n) if j not in self.fixed]
        pos = {j: i for i, j in enumerate(self.free)}
        self.exponent_uncertain = any(t.a_cols for p in self.gp.inequalities for t in p)
        rows, cols, vals, starts = [], [], [], []
        b0, fixed_part = [], []
        bcols = []
        T = 0
        L = self.gp.num_perts
        for p in self.gp.inequalities:
            starts.append(T)
            for t in p:
                contrib = 0.0
                for j, v in t.a0.items():
                    if j in pos:
                        rows.append(T)
                        cols.append(pos[j])
                        vals.append(v)
                    else:
                        contrib += v * self.fixed[j]
                b0.append(t.b0)
                fixed_part.append(contrib)
                bcols.append(t.b_cols)
                T += 1
        self.B = np.zeros((T, L))
        for k, colmap in enumerate(bcols):
            for l, v in colmap.items():
                self.B[k, l] = v
        self.b_base = np.array(b0) + np.array(fixed_part)
        obj = self.gp.objective[0]
        c = np.zeros(len(self.free))
        c0 = obj.b0
        for j, v in obj.a0.items():
            if j in pos:
                c[pos[j]] = v
            else:
                c0 += v * self.fixed[j]
        self.compiled = Compiled(len(self.free), c, c0, rows, cols, vals, list(self.b_base), starts, [])

    def solve(self, zeta: Sequence[float] | None = None, x0=None) -> SolveResult:
        if self.exponent_uncertain and zeta is not None:
            return fix_and_solve_slow(self.gp, self.fixed, zeta, self.tol)
        b = self.b_base if zeta is None else self.b_base + self.B @ np.asarray(zeta, dtype=float)
        return solve_compiled(self.compiled.with_data(b), self.tol, x0)

    def full_x(self, x_free: np.ndarray) -> np.ndarray:
        x = np.zeros(self.gp.num_vars)
        for j, v in self.fixed.items():
            x[j] = v
        x[self.free] = x_free
        return x


def fix_and_solve_slow(gp: GeometricProgram, fixed: Mapping[int, float], zeta, tol=None) -> SolveResult:
    from ..uncertainty import realize_program
    return FixedDesignSolver(realize_program(gp, zeta), fixed, tol).solve()


def fix_and_solve(gp: GeometricProgram, fixed: Mapping[int, float], zeta: Sequence[float] | None = None,
                  tol: Tolerances | None = None) -> SolveResult:
    """Solve ``gp`` realized at ``zeta`` over the variables not in ``fixed``.

    ``Infeasible`` means the fixed design admits no feasible completion.
    """
    return FixedDesignSolver(gp, fixed, tol).solve(zeta)
