import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from robustgp.core import AffineData
from robustgp.pwl import build_pwl, gap_check, phi, pieces, two_term_bound
from robustgp.robust_lin import robust_value
from robustgp.uncertainty import PerturbationSet


def test_two_pieces():
    ap = build_pwl(2)
    assert ap.slopes == (0.0, 1.0) and ap.breakpoints == (0.0,)
    assert ap.eps == math.log(2.0)


def test_three_pieces_middle_tangent_at_zero():
    ap = build_pwl(3)
    assert ap.slopes[1] == pytest.approx(0.5, abs=1e-12)
    assert ap.intercepts[1] == pytest.approx(math.log(2.0), abs=1e-12)


def _max_error(ap):
    """Independent oracle: max of phi - lower between consecutive breakpoints by bounded search."""
    worst = 0.0
    edges = [-60.0, *ap.breakpoints, 60.0]
    for a, b in zip(edges, edges[1:]):
        r = minimize_scalar(lambda x: -(phi(x) - ap.lower(x)), bounds=(a, b), method="bounded",
                            options={"xatol": 1e-12})
        worst = max(worst, -r.fun)
    return worst


@pytest.mark.parametrize("r", [3, 4, 7, 10, 25])
def test_error_equals_eps(r):
    ap = build_pwl(r)
    assert _max_error(ap) == pytest.approx(ap.eps, rel=1e-6)
    # errors at the breakpoints are equal
    errs = [float(phi(b) - ap.lower(b)) for b in ap.breakpoints]
    assert max(errs) - min(errs) < 1e-9


@pytest.mark.parametrize("r", [3, 6, 11])
def test_symmetry_and_tangency(r):
    ap = build_pwl(r)
    bp = np.array(ap.breakpoints)
    assert np.allclose(bp, -bp[::-1], atol=1e-9)
    for x in ap.tangent_points:
        assert float(ap.lower(x)) == pytest.approx(float(phi(x)), abs=1e-10)


def test_eps_decreasing():
    eps = [build_pwl(r).eps for r in range(2, 101)]
    assert all(b < a for a, b in zip(eps, eps[1:]))


@settings(max_examples=80, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.integers(2, 40))
def test_two_term_sandwich(y1, y2, r):
    ap = build_pwl(r)
    exact = float(np.logaddexp(y1, y2))
    low = float(ap.two_term_lower(y1, y2))
    assert low <= exact + 1e-12
    assert exact <= low + ap.eps + 1e-12


def test_identical_terms():
    ap = build_pwl(9)
    assert float(ap.two_term_lower(1.3, 1.3)) == pytest.approx(1.3 + math.log(2.0), abs=ap.eps)


def test_certain_pieces_within_eps():
    y1, y2 = AffineData({0: 1.0}), AffineData({1: 1.0}, 0.5)
    x = np.array([0.3, -0.2])
    lo = max(p.value(x) for p in pieces(y1, y2, 12, safe=False))
    exact = float(np.logaddexp(y1.value(x), y2.value(x)))
    assert lo <= exact <= lo + build_pwl(12).eps


def test_wing_weight_pieces_bound_vertices(wing_gp):
    from robustgp.program import from_gp
    from robustgp.solver import solve
    x = solve(from_gp(wing_gp, nominal=True)).x
    y1, y2 = wing_gp.inequalities[1].terms
    pset = PerturbationSet("box", 1.0)
    L = wing_gp.num_perts
    support = sorted(y1.support | y2.support)
    verts = ((np.arange(1 << len(support))[:, None] >> np.arange(len(support))) & 1) * 2.0 - 1.0
    brute = -np.inf
    for v in verts:
        z = np.zeros(L)
        z[support] = v
        brute = max(brute, float(np.logaddexp(y1.value(x, z), y2.value(x, z))))
    r = 20
    robust_pieces = [robust_value(p, x, pset) for p in pieces(y1, y2, r, safe=False)]
    assert max(robust_pieces) <= brute + build_pwl(r).eps
    assert two_term_bound(y1, y2, x, pset, r) >= brute


def test_gap_check():
    assert gap_check(2.0, 2.0) == 0.0
    assert gap_check(2.2, 2.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        gap_check(1.0, 0.0)


def test_rejects_one_piece():
    with pytest.raises(ValueError):
        build_pwl(1)
