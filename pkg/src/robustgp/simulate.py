"""Monte Carlo evaluation of fixed designs and Gamma sweeps."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import GeometricProgram, normalize
from .formulations import METHODS, MethodResult, method_name, robust_solve
from .solver import INFEASIBLE, OPTIMAL, FixedDesignSolver, Tolerances
from .uncertainty import PerturbationSet, sample_perturbation

Z95 = 1.959963984540054

# a sample counts as feasible when every constraint can be met to within this (log scale)
SIM_TOL = Tolerances(infeas=1e-8, opt=1e-7)


def wilson_interval(failures: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = failures / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the bounds are exact at the extremes; avoid roundoff residue there
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == n else min(1.0, center + half)
    return lo, hi


@dataclass
class SampleRecord:
    zeta: np.ndarray
    status: str
    objective: float


@dataclass
class SimulationReport:
    samples: int
    failures: int
    numerical_failures: int
    mean_objective: float
    wilson: tuple[float, float]
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def pfail(self) -> float:
        return self.failures / self.samples if self.samples else 0.0

    @property
    def half_width(self) -> float:
        return 0.5 * (self.wilson[1] - self.wilson[0])

    def to_dict(self, records: bool = False) -> dict:
        out = {
            "samples": self.samples, "failures": self.failures, "pfail": self.pfail,
            "numerical_failures": self.numerical_failures, "mean_objective": self.mean_objective,
            "wilson_low": self.wilson[0], "wilson_high": self.wilson[1],
        }
        if records:
            out["records"] = [{"zeta": r.zeta.tolist(), "status": r.status, "objective": r.objective}
                              for r in self.records]
        return out


def design_of(source, gp: GeometricProgram | None = None) -> dict[int, float]:
    """Log-space design assignment from a result, a full point, or a mapping."""
    if isinstance(source, MethodResult):
        return source.design()
    if isinstance(source, Mapping):
        return {int(k): float(v) for k, v in source.items()}
    x = np.asarray(source, dtype=float)
    return {j: float(x[j]) for j in gp.design_vars}


def simulate(gp: GeometricProgram, design, pset: PerturbationSet, n_samples: int = 1000,
             seed: int | None = 0, tol: Tolerances | None = None, keep_records: bool = True) -> SimulationReport:
    """Fix the design, realize the data ``n_samples`` times and re-solve for the rest.

    A sample fails when the remaining variables admit no feasible completion;
    solver breakdowns also count as failures and are tallied separately.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    gp = normalize(gp)
    fixed = design_of(design, gp)
    solver = FixedDesignSolver(gp, fixed, tol or SIM_TOL)
    zetas = sample_perturbation(pset, gp.num_perts, np.random.default_rng(seed), size=n_samples)
    records = []
    failures = numerical = 0
    objs = []
    for z in zetas:
        res = solver.solve(z)
        if res.status == OPTIMAL:
            objs.append(math.exp(res.objective))
        else:
            failures += 1
            if res.status != INFEASIBLE:
                numerical += 1
        if keep_records:
            records.append(SampleRecord(z, res.status, math.exp(res.objective) if res.ok else math.nan))
    return SimulationReport(
        samples=n_samples, failures=failures, numerical_failures=numerical,
        mean_objective=float(np.mean(objs)) if objs else math.nan,
        wilson=wilson_interval(failures, n_samples), records=records,
    )


CSV_HEADER = ("gamma", "method", "set", "objective", "pfail", "mean_obj", "n_constraints", "r", "wall_ms")


@dataclass
class SweepCell:
    gamma: float
    method: str
    set_kind: str
    objective: float
    pfail: float
    mean_obj: float
    n_constraints: int
    r: int
    wall_ms: float
    status: str = OPTIMAL
    wilson: tuple[float, float] = (0.0, 0.0)
    gap: float = 0.0

    def row(self) -> tuple:
        return (self.gamma, self.method, self.set_kind, self.objective, self.pfail, self.mean_obj,
                self.n_constraints, self.r, self.wall_ms)


@dataclass
class SweepResult:
    gammas: list[float]
    cells: list[SweepCell]
    sim_gamma: float

    def for_method(self, method: str) -> list[SweepCell]:
        m = method_name(method)
        return [c for c in self.cells if c.method == m]

    def csv(self) -> str:
        lines = [",".join(CSV_HEADER)]
        for c in self.cells:
            lines.append(",".join(_fmt(v) for v in c.row()))
        return "\n".join(lines) + "\n"

    def monotone_objectives(self, rel: float = 1e-7) -> bool:
        """Robust objective is non-decreasing in Gamma for every method."""
        for m in {c.method for c in self.cells}:
            objs = [c.objective for c in self.for_method(m)]
            if any(b < a * (1 - rel) for a, b in zip(objs, objs[1:]) if math.isfinite(a) and math.isfinite(b)):
                return False
        return True


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "nan"
    return str(v)


def gamma_sweep(gp: GeometricProgram, methods: Sequence[str] = METHODS, set_kind: str = "box",
                gammas: Sequence[float] = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), gap_tol: float = 1e-3,
                n_samples: int = 1000, seed: int | None = 0, sim_gamma: float | None = None,
                sigma=None, r: int | None = None, max_iters: int = 20) -> SweepResult:
    """Solve every method at every Gamma and simulate each design.

    Designs are simulated against the set at ``sim_gamma`` (default: the largest
    grid value) so the failure probabilities share one yardstick.  Per method,
    ``r`` is first chosen per cell by the gap policy and then unified to the
    largest value so that objectives are comparable across the grid.
    """
    grid = [float(g) for g in gammas]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("Gamma grid must be strictly increasing")
    sim_gamma = grid[-1] if sim_gamma is None else float(sim_gamma)
    sim_set = PerturbationSet(set_kind, sim_gamma, sigma)
    cells = []
    for method in (method_name(m) for m in methods):
        results = {}
        for g in grid:
            results[g] = robust_solve(gp, method, PerturbationSet(set_kind, g, sigma), r=r, gap_tol=gap_tol,
                                      seed=seed, max_iters=max_iters)
        r_max = max(res.r for res in results.values())
        if r is None and r_max > 0:
            for g, res in results.items():
                if res.r != r_max:
                    t0 = res.wall_ms
                    results[g] = robust_solve(gp, method, PerturbationSet(set_kind, g, sigma), r=r_max,
                                              seed=seed, max_iters=max_iters)
                    results[g].wall_ms += t0
        for g in grid:
            res = results[g]
            if res.ok:
                t = time.perf_counter()
                rep = simulate(gp, res, sim_set, n_samples, seed, keep_records=False)
                pf, mo, wil = rep.pfail, rep.mean_objective, rep.wilson
                wall = res.wall_ms + 1e3 * (time.perf_counter() - t)
            else:
                pf, mo, wil, wall = math.nan, math.nan, (math.nan, math.nan), res.wall_ms
            cells.append(SweepCell(g, method, set_kind, res.objective, pf, mo, res.n_constraints, res.r, wall,
                                   res.status, wil, res.gap))
    return SweepResult(grid, cells, sim_gamma)
