"""Two-Term and Simple Conservative formulations.

Both work on each original posynomial without looking at dependence: the
two-term chain splits a K-term posynomial into K-1 robust two-term blocks,
while the simple conservative form bounds every monomial separately.
"""

from __future__ import annotations

from ..core import AffineData, GeometricProgram
from ..partition import CategorizedProgram
from ..pwl import robustify_two_term
from ..robust_lin import robust_value, robustify
from ..uncertainty import PerturbationSet
from .common import SIMPLE, TWO_TERM, RobustProgram, budget, lse_value, prepare, start_program, var_term


def two_term_formulation(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet, r: int,
                         safe: bool = True) -> RobustProgram:
    """Chain ``M1 + e^t1 <= 1, Mk + e^tk <= e^t(k-1), ..., M(K-1) + MK <= e^t(K-2)``.

    ``safe=False`` gives the lower relaxation used for the gap check.
    """
    if r < 2:
        raise ValueError("two-term formulation needs r >= 2")
    gp, _ = prepare(gp, pset)
    prog = start_program(gp)
    rp = RobustProgram(prog, TWO_TERM, pset, gp, r=r)
    for i, p in enumerate(gp.inequalities):
        K = len(p)
        if K == 1:
            robustify(p[0], None, pset, prog, name=f"c{i}_w")
            continue
        rhs = None
        for k in range(K - 2):
            t = prog.new_var(f"c{i}_chain{k}")
            rp.completions.append((t, _chain_completion(p, k + 1, pset)))
            robustify_two_term(p[k], var_term(t), pset, r, safe, rhs, prog, name=f"c{i}_b{k}")
            rp.pwl_blocks += 1
            rhs = var_term(t)
        robustify_two_term(p[K - 2], p[K - 1], pset, r, safe, rhs, prog, name=f"c{i}_b{K - 2}")
        rp.pwl_blocks += 1
    return rp


def _chain_completion(p, start: int, pset):
    def fn(x):
        return lse_value([robust_value(m, x, pset) for m in p.terms[start:]])
    return fn


def simple_conservative(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet) -> RobustProgram:
    """``sum_k e^tk <= 1`` with each monomial robustly bounded by its own ``e^tk``."""
    gp, _ = prepare(gp, pset)
    prog = start_program(gp)
    rp = RobustProgram(prog, SIMPLE, pset, gp)
    for i, p in enumerate(gp.inequalities):
        if len(p) == 1:
            robustify(p[0], None, pset, prog, name=f"c{i}_w")
            continue
        ts = []
        for k, m in enumerate(p):
            t = prog.new_var(f"c{i}_t{k}")
            rp.completions.append((t, _monomial_completion(m, pset)))
            ts.append(t)
        budget(prog, ts, None, ("budget", i))
        for k, m in enumerate(p):
            robustify(m, AffineData({ts[k]: 1.0}), pset, prog, name=f"c{i}_{k}_w")
    return rp


def _monomial_completion(m, pset):
    def fn(x):
        return robust_value(m, x, pset)
    return fn
