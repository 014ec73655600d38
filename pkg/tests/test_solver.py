import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustgp.core import AffineData, GeometricProgram, Monomial, Posynomial
from robustgp.program import LogSumExp, Program, SecondOrderCone, SignomialLe, from_gp, linear
from robustgp.robust_lin import worst_case_vertex
from robustgp.solver import (INFEASIBLE, NUMERICAL_FAILURE, FixedDesignSolver, condense, fix_and_solve, solve,
                             solve_convex)


def _gp(obj, cons):
    return GeometricProgram(Posynomial((obj,)), tuple(Posynomial(tuple(c)) for c in cons))


def test_single_bound():
    res = solve(from_gp(_gp(Monomial({0: 1.0}), [[Monomial({0: -1.0})]])))
    assert res.ok and abs(res.x[0]) < 1e-8 and abs(res.objective) < 1e-8


def test_two_bounds():
    res = solve(from_gp(_gp(Monomial({0: 1.0, 1: 1.0}), [[Monomial({0: -1.0})], [Monomial({1: -1.0})]])))
    assert res.ok and np.allclose(res.x, 0.0, atol=1e-8)


def test_log_sum_exp_constraint():
    # min x s.t. e^{-x} + e^{-x} <= 1  ->  x = log 2
    res = solve(from_gp(_gp(Monomial({0: 1.0}), [[Monomial({0: -1.0}), Monomial({0: -1.0})]])))
    assert res.x[0] == pytest.approx(math.log(2.0), abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(0.1, 3.0), st.floats(-3.0, 3.0)), min_size=1, max_size=6))
def test_random_separable_gp(data):
    """min prod u_j^{a_j} s.t. c_j / u_j <= 1 has u_j = c_j."""
    a = [d[0] for d in data]
    logc = [d[1] for d in data]
    obj = Monomial({j: aj for j, aj in enumerate(a)})
    cons = [[Monomial({j: -1.0}, lc)] for j, lc in enumerate(logc)]
    res = solve(from_gp(_gp(obj, cons)))
    assert res.ok
    assert np.allclose(res.x, logc, atol=1e-7)
    assert res.objective == pytest.approx(float(np.dot(a, logc)), abs=1e-7)


def test_second_order_cone():
    # min y s.t. ||(x - 1)|| <= y - 0 with x free in [-5, 5]: optimum y = 0 at x = 1
    prog = Program(AffineData({1: 1.0}), var_names=["x", "y"])
    prog.add(SecondOrderCone((AffineData({0: 1.0}, -1.0),), AffineData({1: -1.0})))
    prog.add(linear(AffineData({0: 1.0}, -5.0)))
    prog.add(linear(AffineData({0: -1.0}, -5.0)))
    res = solve_convex(prog)
    assert res.ok and res.x[0] == pytest.approx(1.0, abs=1e-5) and res.x[1] == pytest.approx(0.0, abs=1e-7)


def test_infeasible_detected():
    res = solve(from_gp(_gp(Monomial({0: 1.0}), [[Monomial({0: 1.0})], [Monomial({0: -1.0}, math.log(2.0))]])))
    assert res.status == INFEASIBLE


def test_unbounded_detected():
    res = solve(from_gp(_gp(Monomial({0: 1.0}), [[Monomial({0: 1.0})]])))
    assert res.status == NUMERICAL_FAILURE and "unbounded" in res.message


def test_signomial_without_subtracted_part_is_one_gp_solve():
    # g - h <= 1 with h = 0: the right side is the constant monomial 1
    base = from_gp(_gp(Monomial({0: 1.0}), [[Monomial({0: -1.0}), Monomial({0: -1.0})]]))
    prog = Program(base.objective, var_names=list(base.var_names))
    prog.add(SignomialLe((AffineData({0: -1.0}), AffineData({0: -1.0})), (AffineData(),)))
    res = solve(prog)
    assert res.ok and res.objective == pytest.approx(solve(base).objective, abs=1e-10)
    assert not res.history
    with pytest.raises(ValueError):
        SignomialLe((AffineData(),), ())


def test_signomial_inactive_constraint():
    # min x s.t. 2/x <= 1 and x^0.5 - 1/x ... written as e^{-x+log 0.1} <= e^{x} + 1: never active
    prog = Program(AffineData({0: 1.0}), var_names=["x"])
    prog.add(LogSumExp((AffineData({0: -1.0}, math.log(2.0)),)))
    prog.add(SignomialLe((AffineData({0: -1.0}, math.log(0.1)),), (AffineData({0: 1.0}), AffineData())))
    res = solve(prog)
    assert res.ok and res.x[0] == pytest.approx(math.log(2.0), abs=1e-7)
    assert len(res.history) <= 2


def test_signomial_active_constraint():
    # min x s.t. 1 + e^{-x} <= e^{x}  ->  e^x = golden ratio
    prog = Program(AffineData({0: 1.0}), var_names=["x"])
    prog.add(SignomialLe((AffineData(), AffineData({0: -1.0})), (AffineData({0: 1.0}),)))
    prog.add(linear(AffineData({0: -1.0}, -3.0)))
    res = solve(prog, np.array([1.0]))
    assert res.ok and math.exp(res.x[0]) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-6)


def test_condensation_is_tight_lower_bound():
    h = (AffineData({0: 1.0}), AffineData({1: 1.0}, 0.3), AffineData({0: -0.5}))
    x = np.array([0.2, -0.4])
    mono = condense(h, x)
    exact = lambda y: float(np.logaddexp.reduce([t.value(y) for t in h]))
    assert mono.value(x) == pytest.approx(exact(x), abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(100):
        y = rng.normal(size=2)
        assert mono.value(y) <= exact(y) + 1e-12


def test_wing_matches_cvxpy(wing_gp):
    cp = pytest.importorskip("cvxpy")
    from robustgp.models import wing_model
    m = wing_model()
    x = {v: cp.Variable(pos=True) for v in m.variables}
    vals = {p.name: p.nominal for p in m.parameters}

    def term(t):
        out = t.coeff
        for n, e in t.powers:
            out = out * (x[n] ** e if n in x else vals[n] ** e)
        return out

    prob = cp.Problem(cp.Minimize(term(m.objective[0])), [sum(term(t) for t in c) <= 1 for c in m.constraints])
    prob.solve(gp=True)
    ours = solve(from_gp(wing_gp, nominal=True)).cost
    assert ours == pytest.approx(prob.value, rel=1e-5)


def test_fixed_design_nominal_and_adversarial(wing_gp):
    res = solve(from_gp(wing_gp, nominal=True))
    fixed = {j: float(res.x[j]) for j in wing_gp.design_vars}
    again = fix_and_solve(wing_gp, fixed)
    assert again.ok and again.objective == pytest.approx(res.objective, abs=1e-7)
    # push every term of the takeoff-lift constraint to its worst vertex
    z = np.zeros(wing_gp.num_perts)
    for l, s in worst_case_vertex(wing_gp.inequalities[6][0], res.x, 1.0).items():
        z[l] = s
    assert FixedDesignSolver(wing_gp, fixed).solve(z).status == INFEASIBLE
