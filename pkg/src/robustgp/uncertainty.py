"""Affine perturbation model of uncertain data and the box/elliptical sets.

A parameter ``p`` with nominal ``p0`` and relative half-width ``rho`` owns one
perturbation coordinate ``zeta`` and is realized as ``p0 * (1 + rho) ** zeta``,
so that its contribution to a monomial's log coefficient is affine in zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import AffineData, GeometricProgram, Monomial, Posynomial
from .model import Parameter, SymbolicModel, Term

BOX = "box"
ELLIPTICAL = "elliptical"

UncertainParameter = Parameter


@dataclass(frozen=True)
class PerturbationSet:
    """``||zeta||_inf <= gamma`` (box) or ``||zeta / sigma||_2 <= gamma`` (elliptical)."""

    kind: str = BOX
    gamma: float = 1.0
    sigma: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in (BOX, ELLIPTICAL):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.sigma is not None:
            sig = tuple(float(s) for s in self.sigma)
            if any(s <= 0 for s in sig):
                raise ValueError("sigma entries must be positive")
            if self.kind == BOX and any(s != 1.0 for s in sig):
                raise ValueError("box sets use unit scales")
            object.__setattr__(self, "sigma", sig)

    @property
    def is_box(self) -> bool:
        return self.kind == BOX

    def scales(self, L: int) -> np.ndarray:
        """Per-coordinate half-widths of the smallest box containing the set."""
        return self.gamma * self.sigma_vec(L)

    def sigma_vec(self, L: int) -> np.ndarray:
        if self.sigma is None:
            return np.ones(L)
        if len(self.sigma) < L:
            raise ValueError(f"sigma has {len(self.sigma)} entries, need {L}")
        return np.asarray(self.sigma[:L], dtype=float)

    def sigma_of(self, l: int) -> float:
        return 1.0 if self.sigma is None else self.sigma[l]

    def norm(self, zeta: Sequence[float]) -> float:
        z = np.asarray(zeta, dtype=float)
        if self.is_box:
            return float(np.max(np.abs(z))) if z.size else 0.0
        return float(np.linalg.norm(z / self.sigma_vec(z.size)))

    def contains(self, zeta: Sequence[float], tol: float = 1e-12) -> bool:
        return self.norm(zeta) <= self.gamma * (1 + tol) + tol

    def with_gamma(self, gamma: float) -> "PerturbationSet":
        return PerturbationSet(self.kind, gamma, self.sigma)


def propagate_parameters(model: SymbolicModel, params: Sequence[Parameter] | None = None) -> GeometricProgram:
    """Fold named parameters into log-space monomial data.

    Each monomial ``c * prod(var^e) * prod(param^e_p)`` becomes
    ``b0 = log c + sum e_p log(nominal_p)`` with ``b^l = e_p log(1 + rho_p)`` on
    the parameter's own coordinate.  Every parameter owns one coordinate; a
    zero half-width leaves that coordinate with empty columns.
    """
    params = list(model.parameters if params is None else params)
    for p in params:
        if not p.nominal > 0:
            raise ValueError(f"parameter {p.name} has non-positive nominal {p.nominal}")
    var_index = {v: j for j, v in enumerate(model.variables)}
    by_name = {p.name: p for p in params}
    pert_index = {p.name: l for l, p in enumerate(params)}

    def convert(term: Term) -> Monomial:
        if term.coeff <= 0:
            raise ValueError("non-positive coefficient in a posynomial term")
        a0: dict[int, float] = {}
        b0 = math.log(term.coeff)
        b_cols: dict[int, float] = {}
        for name, e in term.powers:
            if name in var_index:
                a0[var_index[name]] = a0.get(var_index[name], 0.0) + e
            elif name in by_name:
                p = by_name[name]
                b0 += e * math.log(p.nominal)
                l = pert_index[name]
                b_cols[l] = b_cols.get(l, 0.0) + e * math.log1p(p.rel)
            else:
                raise KeyError(f"undeclared identifier {name!r}")
        return Monomial(a0, b0, {}, b_cols)

    objective = Posynomial(tuple(convert(t) for t in model.objective))
    if not objective.is_certain:
        raise ValueError("uncertain objectives are not supported; move the data into a constraint")
    ineqs = tuple(Posynomial(tuple(convert(t) for t in c)) for c in model.constraints)
    return GeometricProgram(
        objective=objective,
        inequalities=ineqs,
        num_vars=len(model.variables),
        var_names=tuple(model.variables),
        num_perts=len(params),
        pert_names=tuple(p.name for p in params),
        design_vars=tuple(var_index[d] for d in model.design),
    )


def sample_perturbation(pset: PerturbationSet, L: int, rng: np.random.Generator | int | None = None,
                        size: int | None = None) -> np.ndarray:
    """Uniform samples from the set.

    Box: independent uniforms on ``[-gamma, gamma]``.  Elliptical: a Gaussian
    direction scaled by ``gamma * U**(1/L)`` and then by ``sigma``.
    """
    rng = np.random.default_rng(rng)
    shape = (L,) if size is None else (size, L)
    if pset.gamma == 0 or L == 0:
        return np.zeros(shape)
    if pset.is_box:
        return rng.uniform(-pset.gamma, pset.gamma, size=shape)
    n = 1 if size is None else size
    g = rng.standard_normal((n, L))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = pset.gamma * rng.uniform(size=(n, 1)) ** (1.0 / L)
    z = g * radius * pset.sigma_vec(L)
    return z[0] if size is None else z


def realize(data: AffineData, zeta: Sequence[float]) -> tuple[dict[int, float], float]:
    """Exponent row and log coefficient of ``data`` at ``zeta``."""
    return data.realize(zeta)


def realize_program(gp: GeometricProgram, zeta: Sequence[float]) -> GeometricProgram:
    """A certain copy of ``gp`` with every monomial evaluated at ``zeta``."""

    def fix(m: Monomial) -> Monomial:
        a, b = m.realize(zeta)
        return Monomial(a, b)

    return GeometricProgram(
        objective=Posynomial(tuple(fix(m) for m in gp.objective)),
        inequalities=tuple(Posynomial(tuple(fix(m) for m in p)) for p in gp.inequalities),
        equalities=tuple(fix(h) for h in gp.equalities),
        num_vars=gp.num_vars,
        var_names=gp.var_names,
        num_perts=gp.num_perts,
        pert_names=gp.pert_names,
        design_vars=gp.design_vars,
    )
