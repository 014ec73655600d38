import math

import numpy as np
import pytest

from robustgp import PerturbationSet, from_gp, solve
from robustgp.formulations import BEST_PAIRS, SIMPLE
from robustgp.simulate import CSV_HEADER, gamma_sweep, simulate, wilson_interval

from conftest import wing_result


def test_wilson_reference_values():
    lo, hi = wilson_interval(0, 1000)
    assert lo == 0.0 and hi == pytest.approx(0.0038267, abs=1e-6)
    lo, hi = wilson_interval(50, 100)
    assert (lo, hi) == pytest.approx((0.40383, 0.59617), abs=1e-5)
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_zero_gamma_simulation_of_nominal_design(wing_gp):
    x = solve(from_gp(wing_gp, nominal=True)).x
    rep = simulate(wing_gp, x, PerturbationSet("box", 0.0), 20)
    assert rep.pfail == 0.0


def test_nominal_design_fails_under_box(wing_gp):
    x = solve(from_gp(wing_gp, nominal=True)).x
    rep = simulate(wing_gp, x, PerturbationSet("box", 1.0), 200, seed=2)
    assert rep.pfail > 0 and rep.wilson[0] > 0


def test_reproducible(wing_gp):
    res = wing_result(SIMPLE, "box", 0.5)
    a = simulate(wing_gp, res, PerturbationSet("box", 1.0), 50, seed=11).to_dict(records=True)
    b = simulate(wing_gp, res, PerturbationSet("box", 1.0), 50, seed=11).to_dict(records=True)
    assert a == b


def test_robust_design_safe_on_smaller_set(wing_gp):
    res = wing_result(BEST_PAIRS, "elliptical", 1.0)
    rep = simulate(wing_gp, res, PerturbationSet("elliptical", 0.6), 200, seed=4)
    assert rep.failures == 0 and rep.numerical_failures == 0


def test_feasible_conditional_mean(wing_gp):
    res = wing_result(SIMPLE, "box", 0.5)
    rep = simulate(wing_gp, res, PerturbationSet("box", 1.0), 100, seed=5)
    ok = [r.objective for r in rep.records if r.status == "Optimal"]
    assert math.isclose(rep.mean_objective, float(np.mean(ok)))
    assert rep.failures == sum(r.status != "Optimal" for r in rep.records)


def test_sweep_single_zero_gamma(wing_gp):
    nominal = solve(from_gp(wing_gp, nominal=True)).cost
    sw = gamma_sweep(wing_gp, [SIMPLE, BEST_PAIRS], "box", [0.0], n_samples=10)
    assert [c.objective for c in sw.cells] == pytest.approx([nominal] * 2, rel=1e-8)


def test_sweep_csv_schema(wing_gp):
    sw = gamma_sweep(wing_gp, [SIMPLE], "elliptical", [0.0, 0.5, 1.0], n_samples=20, seed=1)
    lines = sw.csv().strip().split("\n")
    assert lines[0] == ",".join(CSV_HEADER) == "gamma,method,set,objective,pfail,mean_obj,n_constraints,r,wall_ms"
    assert len(lines) == 4 and all(len(line.split(",")) == 9 for line in lines)
    assert sw.monotone_objectives()
    assert sw.cells[-1].pfail == 0.0


def test_sweep_rejects_unsorted_grid(wing_gp):
    with pytest.raises(ValueError):
        gamma_sweep(wing_gp, [SIMPLE], "box", [1.0, 0.5])


def test_elliptical_beats_box_at_matched_failure(wing_gp):
    """Both designs are safe against the box of the same size; the elliptical one is cheaper."""
    box = wing_result(BEST_PAIRS, "box", 1.0)
    ell = wing_result(BEST_PAIRS, "elliptical", 1.0)
    pset = PerturbationSet("elliptical", 1.0)
    rb = simulate(wing_gp, box, pset, 300, seed=9)
    re = simulate(wing_gp, ell, pset, 300, seed=9)
    assert rb.pfail == re.pfail == 0.0
    assert re.mean_objective <= rb.mean_objective
