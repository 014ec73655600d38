"""Sequential GP solution of signomial programs by monomial condensation."""

from __future__ import annotations

import math

import numpy as np

from ..core import AffineData
from ..program import LogSumExp, Program, SignomialLe, linear
from .ipm import INFEASIBLE, MAX_ITER, NUMERICAL_FAILURE, OPTIMAL, SolveResult, Tolerances, solve_convex


def condense(h: tuple[AffineData, ...], x: np.ndarray) -> AffineData:
    """Best local monomial under-estimate of ``sum exp(h_k)`` at ``x``.

    By the weighted AM-GM inequality ``sum_k exp(h_k) >= prod_k (exp(h_k)/w_k)^w_k``
    with ``w_k`` the term shares at ``x``; the bound is tight at ``x``.
    """
    ys = np.array([t.value(x) for t in h])
    w = np.exp(ys - ys.max())
    w /= w.sum()
    out = AffineData()
    entropy = 0.0
    for wk, t in zip(w, h):
        if wk > 0:
            out = out + t.scaled(float(wk))
            entropy -= wk * math.log(wk)
    return out.shifted(entropy)


def _inner(prog: Program, x: np.ndarray, radius: float) -> Program:
    inner = Program(prog.objective, var_names=list(prog.var_names))
    for c in prog.constraints:
        if isinstance(c, SignomialLe):
            inner.add(LogSumExp(tuple(g - condense(c.h, x) for g in c.g)))
        else:
            inner.add(c)
    if math.isfinite(radius):
        for j in range(prog.num_vars):
            inner.add(linear(AffineData({j: 1.0}, -x[j] - radius)))
            inner.add(linear(AffineData({j: -1.0}, x[j] - radius)))
    return inner


def solve_signomial(prog: Program, x0=None, tol: Tolerances | None = None,
                    radius: float = 4.0, retries: int = 8) -> SolveResult:
    """Iterate condensation + GP solve until the objective settles.

    Each inner program is a restriction of the signomial program around the
    current point, confined to a log-space trust region of half-width
    ``radius``.  The region halves whenever an inner solve fails or would raise
    the objective.
    """
    tol = tol or Tolerances()
    prog = _exact_monomial_parts(prog)
    if not any(isinstance(c, SignomialLe) for c in prog.constraints):
        return solve_convex(prog, tol, x0)
    x = np.zeros(prog.num_vars) if x0 is None else np.asarray(x0, dtype=float).copy()
    history: list[float] = []
    best: SolveResult | None = None
    fails = 0
    total = 0
    it = 0
    while it < tol.sp_max_iter:
        it += 1
        res = solve_convex(_inner(prog, x, radius), tol, x)
        total += res.iterations
        if not res.ok or (history and res.objective > history[-1] + 1e-12):
            fails += 1
            if fails > retries:
                break
            radius *= 0.5
            continue
        x = res.x
        history.append(res.objective)
        best = res
        if len(history) >= 2 and abs(math.expm1(history[-1] - history[-2])) < tol.sp:
            break
    if best is None:
        status = INFEASIBLE if res.status == INFEASIBLE else NUMERICAL_FAILURE
        return SolveResult(status, x, iterations=total, message="no inner GP could be solved", history=history)
    viol = prog.violation(best.x)
    status = OPTIMAL
    if viol > tol.feas:
        status = NUMERICAL_FAILURE
    elif it >= tol.sp_max_iter and not (len(history) >= 2 and abs(math.expm1(history[-1] - history[-2])) < tol.sp):
        status = MAX_ITER
    return SolveResult(status, best.x, objective=best.objective, iterations=total, residual=viol,
                       gap=best.gap, message=f"{len(history)} condensation steps", history=history)


def _exact_monomial_parts(prog: Program) -> Program:
    """Signomial constraints with a one-term right side are log-sum-exp constraints."""
    if not any(isinstance(c, SignomialLe) and len(c.h) == 1 for c in prog.constraints):
        return prog
    out = Program(prog.objective, var_names=list(prog.var_names))
    for c, src in zip(prog.constraints, prog.sources):
        if isinstance(c, SignomialLe) and len(c.h) == 1:
            c = LogSumExp(tuple(g - c.h[0] for g in c.g))
        out.add(c, src)
    return out


def solve(prog: Program, x0=None, tol: Tolerances | None = None) -> SolveResult:
    """Dispatch on program kind."""
    if any(isinstance(c, SignomialLe) for c in prog.constraints):
        return solve_signomial(prog, x0, tol)
    return solve_convex(prog, tol, x0)
