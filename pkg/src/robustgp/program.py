"""Data-free log-space programs handed to the solver.

Constraint kinds (all in log space, over ``x``):

* :class:`LogSumExp`      ``log sum_k exp(y_k) <= 0`` (one term is a linear constraint)
* :class:`SecondOrderCone` ``||(y_l)_l||_2 + y_0 <= 0``
* :class:`SignomialLe`     ``sum exp(g_k) <= sum exp(h_k)``, not convex in general
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .core import AffineData, GeometricProgram, to_epigraph_form, to_inequality_form

GP = "GP"
CONIC = "Conic"
SIGNOMIAL = "Signomial"


def affine(coeffs=None, const: float = 0.0) -> AffineData:
    return AffineData(coeffs or {}, const)


def var(j: int, scale: float = 1.0, const: float = 0.0) -> AffineData:
    return AffineData({j: scale}, const)


ZERO = AffineData()


@dataclass(frozen=True)
class LogSumExp:
    terms: tuple[AffineData, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("empty log-sum-exp constraint")
        if any(not t.is_certain for t in self.terms):
            raise ValueError("emitted constraints must be data-free")

    def value(self, x) -> float:
        ys = np.array([t.value(x) for t in self.terms])
        m = ys.max()
        return float(m + np.log(np.exp(ys - m).sum()))


@dataclass(frozen=True)
class SecondOrderCone:
    rows: tuple[AffineData, ...]
    lin: AffineData

    def value(self, x) -> float:
        u = np.array([r.value(x) for r in self.rows])
        return float(np.linalg.norm(u) + self.lin.value(x))


@dataclass(frozen=True)
class SignomialLe:
    g: tuple[AffineData, ...]
    h: tuple[AffineData, ...]

    def __post_init__(self):
        if not self.g or not self.h:
            raise ValueError("a signomial constraint needs terms on both sides")

    def value(self, x) -> float:
        """``log(sum exp g) - log(sum exp h)``; feasible iff <= 0."""
        return LogSumExp(self.g).value(x) - LogSumExp(self.h).value(x)


Constraint = Union[LogSumExp, SecondOrderCone, SignomialLe]


def linear(row: AffineData) -> LogSumExp:
    """``row <= 0``."""
    return LogSumExp((row,))


@dataclass
class Program:
    """Minimize ``objective.value(x)`` subject to ``constraints``."""

    objective: AffineData
    constraints: list = field(default_factory=list)
    var_names: list = field(default_factory=list)
    sources: list = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def kind(self) -> str:
        if any(isinstance(c, SignomialLe) for c in self.constraints):
            return SIGNOMIAL
        if any(isinstance(c, SecondOrderCone) for c in self.constraints):
            return CONIC
        return GP

    def new_var(self, name: str) -> int:
        self.var_names.append(name)
        return len(self.var_names) - 1

    def add(self, c: Constraint, source=None) -> None:
        self.constraints.append(c)
        self.sources.append(source)

    def violation(self, x) -> float:
        """Largest constraint value at ``x`` (<= 0 means feasible)."""
        if not self.constraints:
            return -np.inf
        return max(c.value(x) for c in self.constraints)

    def objective_value(self, x) -> float:
        return self.objective.value(x)


def from_gp(gp: GeometricProgram, nominal: bool = False) -> Program:
    """Convex form of a certain GP: ``log f_i(x) <= 0`` and a linear objective.

    ``nominal=True`` drops any perturbation data (the ``zeta = 0`` program).
    """
    gp = to_inequality_form(gp)
    if not gp.is_epigraph():
        gp = to_epigraph_form(gp)
    for p in gp.inequalities:
        if not nominal and not p.is_certain:
            raise ValueError("program still carries uncertain data; realize or robustify it first")
    prog = Program(objective=gp.objective[0].nominal(), var_names=list(gp.var_names))
    for i, p in enumerate(gp.inequalities):
        prog.add(LogSumExp(tuple(t.nominal() for t in p)), ("constraint", i))
    return prog


def lse_terms(terms: Sequence[AffineData], rhs: AffineData | None = None) -> LogSumExp:
    """``sum exp(terms) <= exp(rhs)`` as a log-sum-exp constraint."""
    if rhs is None:
        return LogSumExp(tuple(terms))
    return LogSumExp(tuple(t - rhs for t in terms))
