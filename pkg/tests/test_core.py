import math

import numpy as np
import pytest

from robustgp.core import (AffineData, GeometricProgram, Monomial, Posynomial, count_constraints, eval_posynomial,
                           log_eval_posynomial, monomial, normalize, to_epigraph_form, to_inequality_form)
from robustgp.program import from_gp
from robustgp.solver import solve


def test_affine_arithmetic_and_realize():
    d = AffineData({0: 1.0}, 0.5, {1: {0: 2.0}}, {0: math.log(2.0)})
    assert d.support == {0, 1}
    a, b = d.realize([1.0, 0.5])
    assert a == {0: 2.0} and b == pytest.approx(0.5 + math.log(2.0))
    assert d.nominal().is_certain
    s = (d + d.scaled(-1.0))
    assert s.is_certain and not s.a0 and s.b0 == 0.0


def test_realize_zero_and_single_coordinate():
    d = AffineData({}, 0.0, {}, {0: math.log(2.0)})
    assert d.realize([0.0]) == ({}, 0.0)
    assert d.realize([1.0])[1] == pytest.approx(math.log(2.0))


def test_equality_becomes_two_inequalities():
    h = Monomial({0: 2.0}, 0.5)
    gp = GeometricProgram(Posynomial((Monomial({0: 1.0}),)), (), (h,))
    out = to_inequality_form(gp)
    assert len(out.inequalities) == 2 and not out.equalities
    up, down = out.inequalities
    assert up[0].a0 == {0: 2.0} and up[0].b0 == 0.5
    assert down[0].a0 == {0: -2.0} and down[0].b0 == -0.5


def test_inequality_form_identity_without_equalities(wing_gp):
    assert to_inequality_form(wing_gp) is wing_gp
    assert len(wing_gp.inequalities) == 8


def test_epigraph_of_multi_term_objective():
    obj = Posynomial((Monomial({0: 1.0}), Monomial({1: 1.0}), Monomial({0: -1.0, 1: -1.0})))
    gp = GeometricProgram(obj, (Posynomial((Monomial({0: -1.0}),)),))
    epi = to_epigraph_form(gp)
    assert epi.num_vars == 3 and len(epi.inequalities) == 2
    assert len(epi.inequalities[-1]) == 3 and epi.is_epigraph()
    assert to_epigraph_form(epi) is epi


def test_posynomial_evaluation():
    assert eval_posynomial(Posynomial((Monomial(),)), [0.3]) == 1.0
    p = Posynomial((Monomial({0: 1.0}), Monomial({0: -1.0})))
    assert eval_posynomial(p, [0.0]) == pytest.approx(2.0)
    assert log_eval_posynomial(p, [0.0]) == pytest.approx(math.log(2.0))


def test_wing_drag_constraint_active_at_nominal_optimum(wing_gp):
    res = solve(from_gp(wing_gp, nominal=True))
    value = eval_posynomial(wing_gp.inequalities[0], res.x)
    assert 1 - 1e-6 <= value <= 1 + 1e-9


def _counting_gp():
    x = [Monomial({j: 1.0}) for j in range(4)]
    return GeometricProgram(Posynomial((Monomial({0: 1.0}),)),
                            (Posynomial(tuple(x)), Posynomial((x[0], x[1]))))


def test_constraint_count_formulas():
    gp = _counting_gp()
    assert count_constraints(gp, "two-term", 10) == 40
    assert count_constraints(gp, "simple") == 8
    mono = GeometricProgram(Posynomial((Monomial({0: 1.0}),)),
                            tuple(Posynomial((Monomial({0: -1.0}, float(k)),)) for k in range(5)))
    assert count_constraints(mono, "two-term", 10) == count_constraints(mono, "simple") == 5


def test_monomial_rejects_non_positive_coefficient():
    with pytest.raises(ValueError):
        monomial({0: 1.0}, coeff=0.0)


def test_normalize_keeps_certain_monomial_objective(wing_gp):
    assert normalize(wing_gp).num_vars == wing_gp.num_vars
    assert np.isfinite(wing_gp.objective[0].b0)
