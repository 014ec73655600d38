from robustgp.core import GeometricProgram, Monomial, Posynomial
from robustgp.partition import build_dependency_graph, categorize, partition
from robustgp.uncertainty import PerturbationSet


def _m(*coords, var=0):
    return Monomial({var: 1.0}, 0.0, {}, {l: 0.1 for l in coords})


def test_indirect_dependence():
    p = Posynomial((_m(0), _m(1), _m(0, 1)))
    g = build_dependency_graph(p)
    assert {frozenset(e) for e in g.edges} == {frozenset({0, 2}), frozenset({1, 2})}
    assert partition(p) == ((0, 1, 2),)


def test_certain_posynomial_singletons():
    p = Posynomial(tuple(Monomial({j: 1.0}) for j in range(4)))
    assert not build_dependency_graph(p).edges
    assert partition(p) == ((0,), (1,), (2,), (3,))


def test_shared_parameter_triangle():
    p = Posynomial((_m(5), _m(5), _m(5)))
    assert len(build_dependency_graph(p).edges) == 3


def test_wing_drag_splits_into_singletons(wing_gp):
    assert partition(wing_gp.inequalities[0]) == ((0,), (1,), (2,))


def test_seven_term_layout():
    # classes {1,4,6}, {2,5}, {3}, {7} (1-based) through shared coordinates
    terms = [_m(0), _m(1), _m(2), _m(0, 3), _m(1), _m(3), _m()]
    gp = GeometricProgram(Posynomial((Monomial({0: 1.0}),)), (Posynomial(tuple(terms)),))
    cat = categorize(gp, PerturbationSet("box", 1.0))
    assert sorted(cat.classes[0]) == [(0, 3, 5), (1, 4), (2,), (6,)]
    assert (len(cat.P), len(cat.N), len(cat.M)) == (1, 1, 2)
    assert len(cat.t_vars) == 4 and cat.budgets == [0]


def test_sizes_two_one_one():
    gp = GeometricProgram(Posynomial((Monomial({0: 1.0}),)), (Posynomial((_m(0), _m(0), _m(1), _m())),))
    cat = categorize(gp, PerturbationSet("box", 1.0))
    assert (len(cat.N), len(cat.M)) == (1, 2) and len(cat.t_vars) == 3


def test_single_class_not_split():
    gp = GeometricProgram(Posynomial((Monomial({0: 1.0}),)), (Posynomial((_m(0), _m(0), _m(0))),))
    cat = categorize(gp, PerturbationSet("box", 1.0))
    assert cat.classes[0] == ((0, 1, 2),) and not cat.t_vars


def test_elliptical_couples_uncertain_terms(wing_gp):
    cat = categorize(wing_gp, PerturbationSet("elliptical", 1.0))
    assert cat.classes[0] == ((0, 1, 2),)
