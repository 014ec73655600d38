"""Robust counterparts of uncertain affine (log-space) constraints.

For ``a(zeta).x + b(zeta) <= rhs`` over the box ``||zeta||_inf <= gamma``
the worst case adds ``gamma * sum_l |b^l + a^l.x|``; over the ellipsoid
``||zeta/sigma||_2 <= gamma`` it adds ``gamma * ||sigma * (b^l + a^l.x)||_2``.
With coefficient-only uncertainty both margins are constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AffineData
from .program import LogSumExp, Program, SecondOrderCone, linear
from .uncertainty import PerturbationSet

LINF = "Linf"
L1 = "L1"
L2 = "L2"
_DUAL = {LINF: L1, L1: LINF, L2: L2}


@dataclass(frozen=True)
class Cone:
    """Norm cone ``{(u, s): ||u||_kind <= s}`` of dimension ``dim``."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in _DUAL:
            raise ValueError(f"unknown cone kind {self.kind!r}")

    def dual(self) -> "Cone":
        return Cone(_DUAL[self.kind], self.dim)

    def contains(self, u, s: float, tol: float = 1e-12) -> bool:
        u = np.asarray(u, dtype=float)
        order = {LINF: np.inf, L1: 1, L2: 2}[self.kind]
        return float(np.linalg.norm(u, order)) <= s + tol


def set_cone(pset: PerturbationSet, L: int) -> Cone:
    """Cone whose slice at ``s = gamma`` is the (unscaled) perturbation set."""
    return Cone(LINF if pset.is_box else L2, L)


@dataclass
class RobustLinearResult:
    constraints: list = field(default_factory=list)
    aux_vars: list = field(default_factory=list)


def _coords(data: AffineData) -> list[int]:
    return sorted(data.support)


def margin(data: AffineData, pset: PerturbationSet, x=None) -> float:
    """Worst-case increase of ``data`` over the set at ``x``.

    ``x`` may be omitted for coefficient-only data.
    """
    if pset.gamma == 0 or data.is_certain:
        return 0.0
    coords = _coords(data)
    if data.a_cols and x is None:
        raise ValueError("exponent uncertainty needs a point x")
    v = np.array([data.b_cols.get(l, 0.0) + sum(c * x[k] for k, c in data.a_cols.get(l, {}).items())
                  for l in coords])
    if pset.is_box:
        return pset.gamma * float(np.abs(v).sum())
    sig = np.array([pset.sigma_of(l) for l in coords])
    return pset.gamma * float(np.linalg.norm(sig * v))


def box_margin(data: AffineData, gamma: float) -> float:
    return margin(data, PerturbationSet("box", gamma))


def elliptical_margin(data: AffineData, gamma: float, sigma=None) -> float:
    return margin(data, PerturbationSet("elliptical", gamma, sigma))


def robust_value(data: AffineData, x, pset: PerturbationSet) -> float:
    """``max_{zeta in set} a(zeta).x + b(zeta)``."""
    return data.value(x) + margin(data, pset, x)


def robustify(data: AffineData, rhs: AffineData | None, pset: PerturbationSet,
              prog: Program | None = None, name: str = "w") -> RobustLinearResult:
    """Emit data-free constraints equivalent to ``data <= rhs`` for every zeta in the set.

    ``rhs`` is a certain affine form (``None`` means 0).  When ``prog`` is given,
    auxiliary variables are allocated in it and the constraints appended.
    """
    rhs = rhs or AffineData()
    base = data.nominal() - rhs
    out = RobustLinearResult()
    if data.is_certain or pset.gamma == 0:
        out.constraints.append(linear(base))
    elif not data.a_cols:
        out.constraints.append(linear(base.shifted(margin(data, pset))))
    elif pset.is_box:
        if prog is None:
            raise ValueError("exponent uncertainty under a box needs a program for auxiliary variables")
        total = base
        for l in _coords(data):
            w = prog.new_var(f"{name}{l}")
            out.aux_vars.append(w)
            col = AffineData(data.a_cols.get(l, {}), data.b_cols.get(l, 0.0))
            wv = AffineData({w: 1.0})
            out.constraints.append(linear(col - wv))
            out.constraints.append(linear(col.scaled(-1.0) - wv))
            total = total + AffineData({w: pset.gamma})
        out.constraints.insert(0, linear(total))
    else:
        rows = tuple(AffineData({k: pset.gamma * pset.sigma_of(l) * c for k, c in data.a_cols.get(l, {}).items()},
                                pset.gamma * pset.sigma_of(l) * data.b_cols.get(l, 0.0))
                     for l in _coords(data))
        out.constraints.append(SecondOrderCone(rows, base))
    if prog is not None:
        for c in out.constraints:
            prog.add(c, ("robust", name))
    return out


def worst_case_vertex(data: AffineData, x, gamma: float) -> dict[int, float]:
    """A maximizing vertex of the box for ``data`` at ``x``."""
    out = {}
    for l in _coords(data):
        v = data.b_cols.get(l, 0.0) + sum(c * x[k] for k, c in data.a_cols.get(l, {}).items())
        out[l] = gamma if v >= 0 else -gamma
    return out


def is_gp_compatible(constraints) -> bool:
    return all(isinstance(c, LogSumExp) for c in constraints)


__all__ = [
    "Cone", "RobustLinearResult", "box_margin", "elliptical_margin", "is_gp_compatible", "margin",
    "robust_value", "robustify", "set_cone", "worst_case_vertex",
]
