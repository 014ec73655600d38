"""Random uncertain GPs with a planted robustly feasible point.

Every variable gets a lower bound ``x_j >= -1`` (the monomial
``e^{-1} / u_j <= 1``) and the objective is a certain monomial with positive
exponents, so the problem is bounded.  Log coefficients of the remaining
constraints are set so that at ``x = 0`` the simple conservative bound for the
unit box equals ``slack`` < 1; hence ``x = 0`` is robustly feasible for any box
or ellipse with ``Gamma <= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import GeometricProgram, log_eval_posynomial
from ..model import Parameter, SymbolicModel, Term
from ..uncertainty import propagate_parameters


@dataclass(frozen=True)
class SyntheticSpec:
    num_vars: int = 20
    num_constraints: int = 40
    max_terms: int = 4
    num_params: int = 6
    sharing: float = 0.5
    seed: int = 0
    slack: float = 0.5
    max_rel: float = 0.3

    def __post_init__(self):
        if self.num_vars < 2:
            raise ValueError("need at least two variables")
        if self.num_constraints < self.num_vars:
            raise ValueError("num_constraints must cover the per-variable bounds")
        if self.max_terms < 1 or not 0 <= self.sharing <= 1 or not 0 < self.slack < 1:
            raise ValueError("invalid synthetic spec")


def synthetic_model(spec: SyntheticSpec) -> SymbolicModel:
    rng = np.random.default_rng(spec.seed)
    names = [f"x{j}" for j in range(spec.num_vars)]
    params = [Parameter(f"p{l}", 1.0, round(float(rng.uniform(0.05, spec.max_rel)), 4))
              for l in range(spec.num_params)]
    rel = {p.name: p.rel for p in params}
    constraints = [(Term(math.exp(-1.0), ((n, -1.0),)),) for n in names]
    for _ in range(spec.num_constraints - spec.num_vars):
        K = int(rng.integers(1, spec.max_terms + 1))
        weights = rng.dirichlet(np.ones(K))
        # parameters shared by the terms of this posynomial
        local = [params[int(i)].name for i in rng.choice(spec.num_params, size=min(2, spec.num_params),
                                                           replace=False)] if params else []
        terms = []
        for k in range(K):
            nv = int(rng.integers(1, min(3, spec.num_vars) + 1))
            idx = rng.choice(spec.num_vars, size=nv, replace=False)
            powers = [(names[int(j)], float(rng.choice([-2, -1.5, -1, -0.5, 0.5, 1, 1.5, 2]))) for j in idx]
            pw = []
            if params and rng.uniform() < spec.sharing:
                pw.append((str(rng.choice(local)), float(rng.choice([-1.0, 1.0]))))
            if params and rng.uniform() < 0.5 * spec.sharing:
                pw.append((params[int(rng.integers(spec.num_params))].name, float(rng.choice([-1.0, 1.0]))))
            margin = sum(abs(e) * math.log1p(rel[n]) for n, e in _merge(pw))
            coeff = spec.slack * weights[k] * math.exp(-margin)
            terms.append(Term(coeff, tuple(powers + pw)))
        constraints.append(tuple(terms))
    c = rng.uniform(0.1, 1.0, size=spec.num_vars)
    objective = (Term(1.0, tuple((n, float(cj)) for n, cj in zip(names, c))),)
    return SymbolicModel(variables=names, parameters=params, objective=objective, constraints=constraints,
                         design=names[:2])


def _merge(pw):
    out: dict[str, float] = {}
    for n, e in pw:
        out[n] = out.get(n, 0.0) + e
    return [(n, e) for n, e in out.items() if e != 0]


def generate_synthetic(spec: SyntheticSpec) -> tuple[GeometricProgram, list[Parameter]]:
    """Deterministic per seed; raises if the planted point is not feasible."""
    model = synthetic_model(spec)
    gp = propagate_parameters(model)
    x0 = np.zeros(gp.num_vars)
    worst = max(log_eval_posynomial(p, x0) for p in gp.inequalities)
    if worst > 0:
        raise RuntimeError(f"planted point violates a constraint by {worst:.3g}")
    return gp, list(model.parameters)
