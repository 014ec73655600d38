"""Simple wing sizing model: minimize drag over aspect ratio and wing area."""

from __future__ import annotations

import math

from ..core import GeometricProgram
from ..model import Parameter, SymbolicModel, Term
from ..uncertainty import propagate_parameters

VARIABLES = ["D", "A", "S", "CD", "CL", "Cf", "Re", "W", "WW", "V"]
DESIGN = ["A", "S"]

PARAMETERS = [
    Parameter("CDA0", 0.0350, 0.428),
    Parameter("k", 1.170, 0.311),
    Parameter("Swet", 2.075, 0.0361),
    Parameter("e", 0.9200, 0.0760),
    Parameter("WW2", 60.00, 0.660),
    Parameter("WW1", 12.00e-5, 0.600),
    Parameter("Nult", 3.300, 0.333),
    Parameter("W0", 6250.0, 0.600),
    Parameter("tau", 0.1200, 0.333),
    Parameter("rho", 1.230, 0.100),
    Parameter("mu", 1.775e-5, 0.0422),
    Parameter("CLmax", 1.600, 0.250),
    Parameter("Vmin", 25.00, 0.200),
]

LABELS = ["drag coefficient", "wing weight", "drag", "Reynolds number", "skin friction",
          "lift", "takeoff lift", "total weight"]


def _t(coeff: float, **powers: float) -> Term:
    return Term(coeff, tuple(powers.items()))


def wing_model() -> SymbolicModel:
    """The eight constraints, each written as ``posynomial <= 1``."""
    constraints = [
        (_t(1, CDA0=1, S=-1, CD=-1), _t(1, k=1, Cf=1, Swet=1, CD=-1),
         _t(1 / math.pi, CL=2, A=-1, e=-1, CD=-1)),
        (_t(1, WW2=1, S=1, WW=-1),
         _t(1, WW1=1, Nult=1, A=1.5, W0=0.5, W=0.5, S=0.5, tau=-1, WW=-1)),
        (_t(0.5, rho=1, S=1, CD=1, V=2, D=-1),),
        (_t(1, Re=1, rho=-1, mu=1, V=-1, S=-0.5, A=0.5),),
        (_t(0.074, Re=-0.2, Cf=-1),),
        (_t(2, W=1, rho=-1, S=-1, CL=-1, V=-2),),
        (_t(2, W=1, rho=-1, S=-1, CLmax=-1, Vmin=-2),),
        (_t(1, W0=1, W=-1), _t(1, WW=1, W=-1)),
    ]
    return SymbolicModel(
        variables=list(VARIABLES),
        parameters=list(PARAMETERS),
        objective=(_t(1, D=1),),
        constraints=constraints,
        design=list(DESIGN),
        labels=list(LABELS),
    )


def build_wing() -> tuple[GeometricProgram, list[Parameter]]:
    """Uncertain wing GP (10 variables, 8 constraints, 13 parameters)."""
    model = wing_model()
    return propagate_parameters(model), list(model.parameters)
