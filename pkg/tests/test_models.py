import numpy as np
import pytest

from robustgp.core import log_eval_posynomial
from robustgp.models import SyntheticSpec, generate_synthetic, wing_model
from robustgp.partition import categorize
from robustgp.uncertainty import PerturbationSet


def test_wing_shape(wing_gp):
    m = wing_model()
    assert len(m.constraints) == 8 and len(m.parameters) == 13
    assert len(m.design) == 2 and len(m.variables) - 1 - len(m.design) == 7  # D is the objective
    sizes = sorted(len(p) for p in wing_gp.inequalities)
    assert sizes.count(3) == 1 and max(sizes) == 3
    assert len(wing_gp.inequalities[0]) == 3 and len(wing_gp.inequalities[1]) == 2


def test_wing_categorized_structure(wing_gp):
    cat = categorize(wing_gp, PerturbationSet("box", 1.0))
    # no two uncertain terms share a parameter, so every class is a single monomial
    assert not cat.P and not cat.N and cat.budgets == [0, 1, 7]
    assert cat.exact_under(PerturbationSet("box", 1.0))


def test_synthetic_deterministic_and_planted():
    spec = SyntheticSpec(num_vars=15, num_constraints=40, num_params=5, seed=3)
    a, _ = generate_synthetic(spec)
    b, _ = generate_synthetic(spec)
    assert a == b
    x0 = np.zeros(a.num_vars)
    assert max(log_eval_posynomial(p, x0) for p in a.inequalities) <= 0
    assert len(a.inequalities) == 40 and a.num_perts == 5


def test_synthetic_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(num_vars=10, num_constraints=5)
    with pytest.raises(ValueError):
        SyntheticSpec(slack=1.5)
