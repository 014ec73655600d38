"""Shared plumbing for the robust formulations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import AffineData, GeometricProgram, normalize
from ..partition import CategorizedProgram, categorize
from ..program import LogSumExp, Program
from ..uncertainty import PerturbationSet

TWO_TERM = "two-term"
SIMPLE = "simple"
LINPERTS = "linperts"
BEST_PAIRS = "best-pairs"
METHODS = (TWO_TERM, SIMPLE, LINPERTS, BEST_PAIRS)

ALIASES = {
    "two-term": TWO_TERM, "two_term": TWO_TERM, "twoterm": TWO_TERM,
    "simple": SIMPLE, "simple-conservative": SIMPLE, "sc": SIMPLE,
    "linperts": LINPERTS, "linearized-perturbations": LINPERTS, "lp": LINPERTS,
    "best-pairs": BEST_PAIRS, "best_pairs": BEST_PAIRS, "bestpairs": BEST_PAIRS, "bp": BEST_PAIRS,
}


def method_name(name: str) -> str:
    try:
        return ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None


@dataclass
class RobustProgram:
    """A data-free program produced by one formulation.

    ``completions`` maps auxiliary variables to functions of a partially
    filled point; they give a natural starting point for signomial solves.
    """

    program: Program
    method: str
    pset: PerturbationSet
    gp: GeometricProgram
    r: int = 0
    pwl_blocks: int = 0
    pairing: dict | None = None
    completions: list[tuple[int, Callable]] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return self.program.kind

    @property
    def n_constraints(self) -> int:
        return self.program.n_constraints

    @property
    def num_original_vars(self) -> int:
        return self.gp.num_vars

    def complete(self, x_orig, margin: float = 0.0) -> np.ndarray:
        """Extend a point in the original variables to all auxiliaries.

        ``margin`` lifts every auxiliary above its tight value, which turns a
        strictly feasible original point into a strictly feasible start.
        """
        x = np.zeros(self.program.num_vars)
        x[: self.gp.num_vars] = np.asarray(x_orig, dtype=float)[: self.gp.num_vars]
        for j, fn in self.completions:
            x[j] = fn(x) + margin
        return x


def prepare(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet,
            coupled: bool | None = None) -> tuple[GeometricProgram, CategorizedProgram]:
    if isinstance(gp, CategorizedProgram):
        return gp.gp, gp
    gp = normalize(gp)
    return gp, categorize(gp, pset, coupled)


def start_program(gp: GeometricProgram) -> Program:
    return Program(gp.objective[0].nominal(), var_names=list(gp.var_names))


def var_term(j: int) -> AffineData:
    return AffineData({j: 1.0})


def budget(prog: Program, t_vars: list[int], rhs: AffineData | None, source) -> None:
    """``sum_j exp(t_j) <= exp(rhs)``."""
    rhs = rhs or AffineData()
    prog.add(LogSumExp(tuple(var_term(t) - rhs for t in t_vars)), source)


def lse_value(values) -> float:
    v = np.asarray(values, dtype=float)
    m = v.max()
    return float(m + np.log(np.exp(v - m).sum()))
