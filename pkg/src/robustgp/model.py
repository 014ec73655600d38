"""Symbolic models: posynomials over named variables and uncertain parameters.

This is the representation produced by the model-file parser and by the
built-in benchmark models, before parameters are folded into log-space data
by :func:`robustgp.uncertainty.propagate_parameters`.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Term:
    """``coeff * prod(name ** power)`` with ``coeff > 0``."""

    coeff: float
    powers: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        merged: dict[str, float] = {}
        for name, p in self.powers:
            merged[name] = merged.get(name, 0.0) + float(p)
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "powers", tuple(sorted((n, p) for n, p in merged.items() if p != 0.0)))

    def __mul__(self, other: "Term") -> "Term":
        return Term(self.coeff * other.coeff, self.powers + other.powers)

    def __pow__(self, e: float) -> "Term":
        return Term(self.coeff ** e, tuple((n, p * e) for n, p in self.powers))

    def inverse(self) -> "Term":
        return self ** -1.0

    def names(self) -> set[str]:
        return {n for n, _ in self.powers}


Expr = tuple[Term, ...]


def expr_mul(a: Expr, b: Expr) -> Expr:
    return tuple(x * y for x in a for y in b)


@dataclass(frozen=True)
class Parameter:
    """A named uncertain parameter: ``nominal`` with relative half-width ``rel``."""

    name: str
    nominal: float
    rel: float = 0.0

    def __post_init__(self):
        if self.rel < 0:
            raise ValueError(f"parameter {self.name}: negative half-width")


@dataclass
class SymbolicModel:
    """``min objective`` subject to ``constraint <= 1`` for every constraint."""

    variables: list[str]
    parameters: list[Parameter]
    objective: Expr
    constraints: list[Expr]
    design: list[str] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)

    def parameter(self, name: str) -> Parameter:
        for p in self.parameters:
            if p.name == name:
                return p
        raise KeyError(name)
