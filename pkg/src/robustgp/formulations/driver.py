"""Formulate, refine ``r`` until the piecewise-linear gap closes, and solve."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..core import GeometricProgram
from ..partition import CategorizedProgram
from ..pwl import R_CAP, R_SCHEDULE, gap_check
from ..solver import OPTIMAL, SolveResult, Tolerances, solve
from ..uncertainty import PerturbationSet
from .best_pairs import best_pairs, best_pairs_formulation
from .common import BEST_PAIRS, LINPERTS, SIMPLE, TWO_TERM, RobustProgram, method_name, prepare
from .decoupled import simple_conservative, two_term_formulation
from .linperts import linearized_perturbations

DEFAULT_GAP_TOL = 1e-3


def formulate(gp: GeometricProgram | CategorizedProgram, method: str, pset: PerturbationSet, r: int = 0,
              safe: bool = True, seed: int | None = 0, pairing: dict | None = None) -> RobustProgram:
    method = method_name(method)
    if method == SIMPLE:
        return simple_conservative(gp, pset)
    if method == TWO_TERM:
        return two_term_formulation(gp, pset, max(r, 2), safe)
    if method == LINPERTS:
        return linearized_perturbations(gp, pset, max(r, 2), safe)
    return best_pairs_formulation(gp, pset, max(r, 2), pairing=pairing, seed=seed, safe=safe)


@dataclass
class MethodResult:
    method: str
    pset: PerturbationSet
    status: str
    log_objective: float
    r: int
    gap: float
    n_constraints: int
    kind: str
    x: np.ndarray | None
    robust: RobustProgram
    solve: SolveResult
    wall_ms: float = 0.0
    trace: list = field(default_factory=list)
    r_history: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    @property
    def objective(self) -> float:
        return math.exp(self.log_objective) if self.ok else math.nan

    def design(self) -> dict[int, float]:
        """Log-space values of the design variables."""
        gp = self.robust.gp
        return {j: float(self.x[j]) for j in gp.design_vars}


def _solve_one(cat, method, pset, r, safe, seed, tol, max_iters, pairing=None, warm=None):
    if method == BEST_PAIRS and pairing is None:
        d = best_pairs(cat, pset, max(r, 2), max_iters=max_iters, seed=seed, safe=safe, tol=tol)
        return d.robust, d.result, d.trace
    rp = formulate(cat, method, pset, r, safe, seed, pairing)
    x0 = None
    if warm is not None and rp.kind == "Signomial":
        x0 = rp.complete(warm)
    return rp, solve(rp.program, x0, tol), []


def robust_solve(gp: GeometricProgram | CategorizedProgram, method: str, pset: PerturbationSet,
                 r: int | None = None, gap_tol: float = DEFAULT_GAP_TOL, schedule=R_SCHEDULE, r_cap: int = R_CAP,
                 seed: int | None = 0, max_iters: int = 20, tol: Tolerances | None = None) -> MethodResult:
    """Solve one robust formulation.

    Methods with two-term blocks are solved for the safe (upper) and relaxed
    (lower) piecewise-linear variants; ``r`` walks ``schedule`` then ``r_cap``
    until the relative objective gap is at most ``gap_tol``.  A fixed ``r``
    skips the walk.
    """
    method = method_name(method)
    start = time.perf_counter()
    _, cat = prepare(gp, pset)
    warm = None
    if method == LINPERTS:
        probe = linearized_perturbations(cat, pset, 2)
        if probe.kind == "Signomial":
            sc = solve(simple_conservative(cat, pset).program, None, tol)
            warm = sc.x[: cat.gp.num_vars] if sc.ok else None
    needs_pwl = method != SIMPLE and formulate(cat, method, pset, 2, seed=seed).pwl_blocks > 0
    if not needs_pwl:
        rp, res, trace = _solve_one(cat, method, pset, 0, True, seed, tol, max_iters, warm=warm)
        rp.r = 0
        return _result(method, pset, rp, res, 0, 0.0, trace, start, [])
    rs = [r] if r is not None else sorted(set(list(schedule) + [r_cap]))
    rs = [q for q in rs if q <= max(r_cap, r or 0)]
    history = []
    for q in rs:
        rp, res, trace = _solve_one(cat, method, pset, q, True, seed, tol, max_iters, warm=warm)
        if not res.ok:
            return _result(method, pset, rp, res, q, math.nan, trace, start, history)
        lo_rp, lo_res, _ = _solve_one(cat, method, pset, q, False, seed, tol, max_iters,
                                      pairing=rp.pairing if method == BEST_PAIRS else None, warm=warm)
        gap = gap_check(math.exp(res.objective), math.exp(lo_res.objective)) if lo_res.ok else math.nan
        history.append((q, gap))
        if lo_res.ok and gap <= gap_tol:
            break
    return _result(method, pset, rp, res, q, gap, trace, start, history)


def _result(method, pset, rp, res, r, gap, trace, start, history) -> MethodResult:
    return MethodResult(
        method=method, pset=pset, status=res.status,
        log_objective=res.objective if res.ok else math.nan, r=r, gap=gap,
        n_constraints=rp.n_constraints, kind=rp.kind,
        x=None if res.x is None else np.asarray(res.x),
        robust=rp, solve=res, wall_ms=1e3 * (time.perf_counter() - start), trace=trace, r_history=history,
    )


@dataclass
class AuditReport:
    checks: list[tuple[str, float, float, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for *_, ok in self.checks)

    def lines(self) -> list[str]:
        return [f"{'ok  ' if ok else 'FAIL'} {name}: {a:.10g} <= {b:.10g}" for name, a, b, ok in self.checks]


def conservativeness_audit(results: dict, tol: float = 1e-4) -> AuditReport:
    """Check the guaranteed orderings between formulations.

    ``results`` maps method name to a :class:`MethodResult` or a raw objective.
    """
    def obj(name):
        for key, val in results.items():
            if method_name(key) == name:
                return val.objective if isinstance(val, MethodResult) else float(val)
        raise KeyError(f"audit needs a result for {name}")

    checks = []
    for better, worse in ((LINPERTS, SIMPLE), (BEST_PAIRS, TWO_TERM)):
        a, b = obj(better), obj(worse)
        checks.append((f"{better} <= {worse}", a, b, bool(a <= b * (1 + tol))))
    return AuditReport(checks)
