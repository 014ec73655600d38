"""Monomials, posynomials and geometric programs in log space.

Every monomial is stored as the affine exponent of ``exp(a.x + b)`` where
``x = log(u)``.  Uncertain data is carried alongside as perturbation columns
so that, for a perturbation vector ``zeta``,

    a(zeta) = a0 + sum_l zeta_l * a_cols[l]
    b(zeta) = b0 + sum_l zeta_l * b_cols[l]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

# natural-log scale; exp(700) is still finite in double precision
OVERFLOW_THRESHOLD = 700.0


class ExponentOverflowError(OverflowError):
    """An exponent argument exceeded :data:`OVERFLOW_THRESHOLD`."""


def _clean(row: Mapping[int, float]) -> dict[int, float]:
    return {int(k): float(v) for k, v in row.items() if v != 0.0}


def _add_rows(r1: Mapping[int, float], r2: Mapping[int, float], s1=1.0, s2=1.0) -> dict[int, float]:
    out = {k: s1 * v for k, v in r1.items()}
    for k, v in r2.items():
        out[k] = out.get(k, 0.0) + s2 * v
    return _clean(out)


@dataclass(frozen=True)
class AffineData:
    """Affine log-space data ``a(zeta).x + b(zeta)``.

    ``a0`` maps variable index to exponent, ``b_cols`` maps perturbation
    index ``l`` to the coefficient column ``b^l`` and ``a_cols`` maps ``l`` to
    the exponent row ``a^l``.
    """

    a0: Mapping[int, float] = field(default_factory=dict)
    b0: float = 0.0
    a_cols: Mapping[int, Mapping[int, float]] = field(default_factory=dict)
    b_cols: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "a0", _clean(self.a0))
        object.__setattr__(self, "b0", float(self.b0))
        object.__setattr__(self, "b_cols", _clean(self.b_cols))
        cols = {int(l): _clean(row) for l, row in self.a_cols.items()}
        object.__setattr__(self, "a_cols", {l: row for l, row in cols.items() if row})
        for v in self.a0.values():
            if not math.isfinite(v):
                raise ValueError("exponents must be finite")
        if not math.isfinite(self.b0):
            raise ValueError("log coefficient must be finite")

    # structure -----------------------------------------------------------
    @property
    def support(self) -> frozenset[int]:
        """Perturbation coordinates this data depends on."""
        return frozenset(self.b_cols) | frozenset(self.a_cols)

    @property
    def is_certain(self) -> bool:
        return not self.b_cols and not self.a_cols

    @property
    def exponent_uncertain(self) -> bool:
        return bool(self.a_cols)

    # algebra -------------------------------------------------------------
    def scaled(self, s: float) -> "AffineData":
        return AffineData(
            {k: s * v for k, v in self.a0.items()},
            s * self.b0,
            {l: {k: s * v for k, v in row.items()} for l, row in self.a_cols.items()},
            {l: s * v for l, v in self.b_cols.items()},
        )

    def shifted(self, c: float) -> "AffineData":
        return AffineData(self.a0, self.b0 + c, self.a_cols, self.b_cols)

    def __add__(self, other: "AffineData") -> "AffineData":
        a_cols = {}
        for l in set(self.a_cols) | set(other.a_cols):
            a_cols[l] = _add_rows(self.a_cols.get(l, {}), other.a_cols.get(l, {}))
        return AffineData(
            _add_rows(self.a0, other.a0),
            self.b0 + other.b0,
            a_cols,
            _add_rows(self.b_cols, other.b_cols),
        )

    def __sub__(self, other: "AffineData") -> "AffineData":
        return self + other.scaled(-1.0)

    def nominal(self) -> "AffineData":
        return AffineData(self.a0, self.b0)

    # evaluation ----------------------------------------------------------
    def realize(self, zeta: Sequence[float] | None = None) -> tuple[dict[int, float], float]:
        """Exponent row and log coefficient at the perturbation ``zeta``."""
        if zeta is None:
            return dict(self.a0), self.b0
        a = dict(self.a0)
        b = self.b0
        for l, bl in self.b_cols.items():
            b += zeta[l] * bl
        for l, row in self.a_cols.items():
            z = zeta[l]
            if z != 0.0:
                for k, v in row.items():
                    a[k] = a.get(k, 0.0) + z * v
        return a, b

    def value(self, x: Sequence[float], zeta: Sequence[float] | None = None) -> float:
        """Log-space value ``a(zeta).x + b(zeta)``."""
        a, b = self.realize(zeta)
        return b + sum(v * x[k] for k, v in a.items())

    def variables(self) -> set[int]:
        out = set(self.a0)
        for row in self.a_cols.values():
            out |= set(row)
        return out


@dataclass(frozen=True)
class Monomial(AffineData):
    """A monomial ``exp(a.x + b)`` together with its uncertain data."""

    @property
    def exps(self) -> Mapping[int, float]:
        return self.a0

    @property
    def log_coeff(self) -> float:
        return self.b0

    @classmethod
    def from_data(cls, data: AffineData) -> "Monomial":
        return cls(data.a0, data.b0, data.a_cols, data.b_cols)

    def reciprocal(self) -> "Monomial":
        return Monomial.from_data(self.scaled(-1.0))

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial.from_data(self + other)

    def eval(self, x, zeta=None) -> float:
        return _safe_exp(self.value(x, zeta))


def _safe_exp(y: float) -> float:
    if y > OVERFLOW_THRESHOLD:
        raise ExponentOverflowError(f"exponent argument {y:.6g} exceeds {OVERFLOW_THRESHOLD}")
    return math.exp(y)


@dataclass(frozen=True)
class Posynomial:
    """Ordered sum of monomials; term order is significant."""

    terms: tuple[Monomial, ...]

    def __post_init__(self):
        terms = tuple(t if isinstance(t, Monomial) else Monomial.from_data(t) for t in self.terms)
        if not terms:
            raise ValueError("a posynomial needs at least one term")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, k: int) -> Monomial:
        return self.terms[k]

    @property
    def is_certain(self) -> bool:
        return all(t.is_certain for t in self.terms)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for t in self.terms:
            out |= t.variables()
        return out


@dataclass(frozen=True)
class SignomialConstraint:
    """``lhs(x) - rhs(x) <= 0`` with both sides posynomials."""

    lhs: Posynomial
    rhs: Posynomial


def eval_posynomial(p: Posynomial, x: Sequence[float], zeta: Sequence[float] | None = None) -> float:
    """Sum of ``exp(a_k.x + b_k)``; raises :class:`ExponentOverflowError` on overflow."""
    return sum(_safe_exp(t.value(x, zeta)) for t in p.terms)


def log_eval_posynomial(p: Posynomial, x, zeta=None) -> float:
    """``log`` of :func:`eval_posynomial`, computed stably."""
    ys = np.array([t.value(x, zeta) for t in p.terms])
    m = ys.max()
    return float(m + np.log(np.exp(ys - m).sum()))


@dataclass(frozen=True)
class GeometricProgram:
    """minimize objective s.t. inequalities <= 1, equalities == 1 (log space)."""

    objective: Posynomial
    inequalities: tuple[Posynomial, ...]
    equalities: tuple[Monomial, ...] = ()
    num_vars: int = 0
    var_names: tuple[str, ...] = ()
    num_perts: int = 0
    pert_names: tuple[str, ...] = ()
    design_vars: tuple[int, ...] = ()

    def __post_init__(self):
        ineqs = tuple(p if isinstance(p, Posynomial) else Posynomial(tuple(p)) for p in self.inequalities)
        object.__setattr__(self, "inequalities", ineqs)
        object.__setattr__(self, "equalities", tuple(self.equalities))
        used = self.objective.variables()
        for p in ineqs:
            used |= p.variables()
        for h in self.equalities:
            used |= h.variables()
        n = self.num_vars or (max(used) + 1 if used else 0)
        object.__setattr__(self, "num_vars", n)
        if used and (min(used) < 0 or max(used) >= n):
            raise ValueError("constraint references a variable outside 0..num_vars-1")
        if not self.var_names:
            object.__setattr__(self, "var_names", tuple(f"x{j}" for j in range(n)))
        elif len(self.var_names) != n:
            raise ValueError("var_names must have num_vars entries")
        supports: set[int] = set()
        for p in (self.objective, *ineqs):
            for t in p.terms:
                supports |= t.support
        for h in self.equalities:
            supports |= h.support
        L = self.num_perts or (max(supports) + 1 if supports else 0)
        object.__setattr__(self, "num_perts", L)
        if supports and max(supports) >= L:
            raise ValueError("perturbation index outside 0..num_perts-1")
        if not self.pert_names:
            object.__setattr__(self, "pert_names", tuple(f"z{l}" for l in range(L)))

    @property
    def num_constraints(self) -> int:
        return len(self.inequalities) + len(self.equalities)

    def var_index(self, name: str) -> int:
        return self.var_names.index(name)

    def is_epigraph(self) -> bool:
        """Objective is a single certain monomial (a linear log-space objective)."""
        return len(self.objective) == 1 and self.objective[0].is_certain


def to_inequality_form(gp: GeometricProgram) -> GeometricProgram:
    """Replace each ``h == 1`` by ``h <= 1`` and ``1/h <= 1``."""
    if not gp.equalities:
        return gp
    extra = []
    for h in gp.equalities:
        extra.append(Posynomial((h,)))
        extra.append(Posynomial((h.reciprocal(),)))
    return replace(gp, inequalities=gp.inequalities + tuple(extra), equalities=())


def to_epigraph_form(gp: GeometricProgram, name: str = "t_obj") -> GeometricProgram:
    """Move the objective into a constraint ``f0 * exp(-t) <= 1`` and minimize ``exp(t)``.

    A program whose objective is already a single certain monomial is returned
    unchanged.
    """
    if gp.is_epigraph():
        return gp
    t = gp.num_vars
    shift = Monomial({t: -1.0})
    moved = Posynomial(tuple(m * shift for m in gp.objective))
    return replace(
        gp,
        objective=Posynomial((Monomial({t: 1.0}),)),
        inequalities=gp.inequalities + (moved,),
        num_vars=gp.num_vars + 1,
        var_names=gp.var_names + (name,),
    )


def normalize(gp: GeometricProgram) -> GeometricProgram:
    """Inequality form with a data-free objective."""
    gp = to_inequality_form(gp)
    if not gp.is_epigraph():
        gp = to_epigraph_form(gp)
    return gp


def term_counts(gp: GeometricProgram) -> tuple[list[int], int, int]:
    """Term counts of posynomials with K >= 3, and |N|, |M| over raw constraints."""
    ks = [len(p) for p in gp.inequalities]
    big = [k for k in ks if k >= 3]
    return big, sum(1 for k in ks if k == 2), sum(1 for k in ks if k == 1)


def count_constraints(gp: GeometricProgram, method: str, r: int | None = None) -> int:
    """Closed-form constraint counts of the two decoupling formulations.

    ``two-term``: ``r*sum_P(K-1) + r*|N| + |M|``;
    ``simple``:   ``sum_P(K+1) + 3|N| + |M|``.
    """
    big, n2, n1 = term_counts(to_inequality_form(gp))
    if method in ("two-term", "two_term", "TwoTerm"):
        if r is None or r < 2:
            raise ValueError("two-term counting needs r >= 2")
        return r * sum(k - 1 for k in big) + r * n2 + n1
    if method in ("simple", "simple-conservative", "SimpleConservative"):
        return sum(k + 1 for k in big) + 3 * n2 + n1
    raise ValueError(f"unknown method {method!r}")


def monomial(exps: Mapping[int, float] | None = None, coeff: float = 1.0, **kw) -> Monomial:
    """Build a monomial from an original-space positive coefficient."""
    if coeff <= 0:
        raise ValueError("monomial coefficients must be positive")
    return Monomial(exps or {}, math.log(coeff), **kw)


def posynomial(terms: Iterable[Monomial]) -> Posynomial:
    return Posynomial(tuple(terms))
