import math

import numpy as np
import pytest

from robustgp.model import Parameter, SymbolicModel, Term
from robustgp.models.wing import PARAMETERS
from robustgp.uncertainty import PerturbationSet, propagate_parameters, sample_perturbation


def test_table_values_loaded():
    by = {p.name: p for p in PARAMETERS}
    assert (by["k"].nominal, by["k"].rel) == (1.170, 0.311)
    assert (by["W0"].nominal, by["W0"].rel) == (6250.0, 0.600)
    assert len(PARAMETERS) == 13


def test_zero_half_width_is_certain():
    m = SymbolicModel(["x"], [Parameter("p", 2.0, 0.0)], (Term(1.0, (("x", 1.0),)),),
                      [(Term(1.0, (("p", 1.0), ("x", -1.0))),)])
    gp = propagate_parameters(m)
    t = gp.inequalities[0][0]
    assert t.is_certain and t.b0 == pytest.approx(math.log(2.0))


def test_wing_weight_vertex_coefficient(wing_gp):
    """All-ones vertex multiplies the coefficient by prod (1+rho)^e."""
    term = wing_gp.inequalities[1][1]
    by = {p.name: p for p in PARAMETERS}
    expected = sum(e * math.log1p(by[n].rel) for n, e in
                   (("WW1", 1), ("Nult", 1), ("W0", 0.5), ("tau", -1)))
    _, b = term.realize(np.ones(wing_gp.num_perts))
    assert b - term.b0 == pytest.approx(expected, abs=1e-12)


def test_zero_gamma_samples_are_zero():
    z = sample_perturbation(PerturbationSet("elliptical", 0.0), 4, 0, size=5)
    assert np.all(z == 0)


def test_box_samples_centered():
    z = sample_perturbation(PerturbationSet("box", 1.0), 2, 7, size=100_000)
    assert np.all(np.abs(z.mean(axis=0)) < 0.02)
    assert np.max(np.abs(z)) <= 1.0


def test_elliptical_samples_inside():
    pset = PerturbationSet("elliptical", 1.5, (1.0, 2.0, 0.5))
    z = sample_perturbation(pset, 3, 1, size=2000)
    assert all(pset.contains(v) for v in z)


def test_set_validation():
    with pytest.raises(ValueError):
        PerturbationSet("sphere", 1.0)
    with pytest.raises(ValueError):
        PerturbationSet("box", -1.0)
