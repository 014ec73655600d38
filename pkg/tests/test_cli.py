import io
import json
from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustgp.cli import (EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, ConfigError, ModelSyntaxError, build_config,
                          format_model, model_to_file, parse_config, parse_grid, parse_model, run, same_structure)
from robustgp.model import Term
from robustgp.models import wing_model
from robustgp.uncertainty import propagate_parameters

WING = str(resources.files("robustgp") / "data" / "wing.gp")


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_param_line():
    mf = parse_model("var x\nparam k = 1.170 pm 31.1%\nmin x\n")
    (p,) = mf.parameters
    assert (p.name, p.nominal, p.rel) == ("k", 1.170, pytest.approx(0.311))


def test_single_monomial_constraint():
    mf = parse_model("var W\nvar S\nvar CL\nvar V\nparam rho = 1.23 pm 10%\nmin W\nst W <= 0.5*rho*S*CL*V^2\n")
    (c,) = mf.to_model().constraints
    assert len(c) == 1
    assert dict(c[0].powers) == {"W": 1.0, "rho": -1.0, "S": -1.0, "CL": -1.0, "V": -2.0}
    assert c[0].coeff == pytest.approx(2.0)


@pytest.mark.parametrize("text, line, col, fragment", [
    ("var x\nmin x\nst x <=\n", 3, 8, "expected an expression"),
    ("var x\nmin x + y\n", 2, 9, "undeclared identifier 'y'"),
    ("var x\nmin x\nst x - 1 <= x\n", 3, 6, "non-posynomial"),
    ("var x\nmin x\nst -2*x <= 1\n", 3, 4, "negative coefficients"),
    ("var x\nmin x\nst x <= 1 + x\n", 3, 9, "monomial"),
    ("var x\nmin x\nst 1/(1 + x) <= 1\n", 3, 6, "division by a sum"),
    ("var x\nmin x\nst (1 + x)^0.5 <= 1\n", 3, 4, "integer power"),
    ("var x\nmin x\nst 0*x <= 1\n", 3, 4, "positive"),
    ("var x\nvar x\nmin x\n", 2, 5, "declared twice"),
    ("var x\nmin x\nst x ! 2\n", 3, 6, "unexpected character"),
])
def test_parse_errors(text, line, col, fragment):
    with pytest.raises(ModelSyntaxError) as exc:
        parse_model(text)
    assert (exc.value.line, exc.value.col) == (line, col)
    assert fragment in str(exc.value)


def test_sum_power_expands():
    mf = parse_model("var x\nvar y\nmin x\nst (x + y)^2 <= 4\n")
    (c,) = mf.to_model().constraints
    assert sorted(t.coeff for t in c) == pytest.approx([0.25, 0.25, 0.5])


def test_greater_equal_constraint():
    mf = parse_model("var x\nvar y\nmin x\nst x*y >= 1 + y\n")
    (c,) = mf.to_model().constraints
    assert {t.powers for t in c} == {(("x", -1.0), ("y", -1.0)), (("x", -1.0),)}


def test_wing_file_matches_builtin():
    mf = parse_model(open(WING, encoding="utf-8").read())
    assert mf.design == ["A", "S"] and len(mf.constraints) == 8
    a = propagate_parameters(mf.to_model())
    b = propagate_parameters(wing_model())
    for p, q in zip(a.inequalities, b.inequalities):
        key = lambda m: tuple(sorted(m.a0.items()))
        for s, t in zip(sorted(p, key=key), sorted(q, key=key)):
            assert s.a0 == t.a0 and s.b0 == pytest.approx(t.b0, abs=1e-12)
            assert s.b_cols.keys() == t.b_cols.keys()
            assert all(s.b_cols[k] == pytest.approx(t.b_cols[k], abs=1e-14) for k in s.b_cols)


def test_round_trip_wing():
    mf = parse_model(open(WING, encoding="utf-8").read())
    assert same_structure(mf, parse_model(format_model(mf)))
    builtin = model_to_file(wing_model())
    assert same_structure(builtin, parse_model(format_model(builtin)))


names = st.sampled_from(["x", "y", "z", "p"])
coeffs = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)
powers = st.floats(-3, 3, allow_nan=False).filter(lambda e: e != 0)
terms = st.builds(lambda c, ps: Term(c, tuple(ps)), coeffs, st.lists(st.tuples(names, powers), max_size=3))


@settings(max_examples=60, deadline=None)
@given(st.lists(terms, min_size=1, max_size=4), st.lists(st.lists(terms, min_size=1, max_size=4), max_size=3),
       st.floats(0.01, 100), st.floats(0, 80))
def test_round_trip_property(obj, cons, nominal, pct):
    from robustgp.cli.modelfile import Constraint, ModelFile, canonical_expr
    from robustgp.model import Parameter
    mf = ModelFile(variables=["x", "y", "z"], design=["y"], parameters=[Parameter("p", nominal, pct / 100)],
                   objective=canonical_expr(obj),
                   constraints=[Constraint(canonical_expr(c), "<=", (Term(2.5, (("x", 1.0),)),)) for c in cons])
    again = parse_model(format_model(mf))
    assert same_structure(mf, again)
    assert same_structure(again, parse_model(format_model(again)))


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# defaults\nmethod = simple\ngamma = 0.5\nsamples=20\nset = elliptical\n")
    values = parse_config(cfg_file.read_text())
    cfg = build_config(values, {"gamma": 0.8})
    assert (cfg.method, cfg.gamma, cfg.samples, cfg.set) == ("simple", 0.8, 20, "elliptical")
    with pytest.raises(ConfigError):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        build_config({"gamma": -1.0}, {})


def test_grid():
    assert len(parse_grid("0:0.2:2")) == 11
    assert parse_grid("0, 0.5,1") == [0.0, 0.5, 1.0]
    with pytest.raises(ConfigError):
        parse_grid("1:0.1:0")


def test_solve_command():
    code, out, _ = _run("solve", WING)
    assert code == EXIT_OK
    assert float(out.splitlines()[0].split("=")[1]) == pytest.approx(405.4397, rel=1e-6)


def test_robustify_json(tmp_path):
    target = tmp_path / "res.json"
    code, _, _ = _run("robustify", WING, "--method", "simple", "--set", "box", "--gamma", "1",
                      "--output", str(target))
    body = json.loads(target.read_text())
    assert code == EXIT_OK and body["n_constraints"] == 15 and body["status"] == "Optimal"
    assert set(body["design"]) == {"A", "S"}


def test_compare_box():
    code, out, _ = _run("compare", WING, "--set", "box", "--gamma", "1")
    body = json.loads(out)
    objs = {m["method"]: m["objective"] for m in body["methods"]}
    assert code == EXIT_OK and body["audit"]["passed"] and len(objs) == 4
    three = [objs["simple"], objs["linperts"], objs["best-pairs"]]
    assert max(three) == pytest.approx(min(three), rel=1e-6)


def test_simulate_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("samples = 30\nseed = 4\n")
    code, out, _ = _run("simulate", WING, "--config", str(cfg), "--method", "simple", "--gamma", "1")
    body = json.loads(out)
    assert code == EXIT_OK and body["samples"] == 30 and body["failures"] == 0
    code, out, _ = _run("simulate", WING, "--config", str(cfg), "--method", "nominal", "--gamma", "1")
    assert code == EXIT_OK and json.loads(out)["failures"] > 0


def test_sweep_rows():
    code, out, _ = _run("sweep", WING, "--set", "elliptical", "--gammas", "0:0.5:1", "--samples", "5",
                        "--methods", "simple,linperts")
    lines = out.strip().split("\n")
    assert code == EXIT_OK and lines[0] == "gamma,method,set,objective,pfail,mean_obj,n_constraints,r,wall_ms"
    assert len(lines) == 1 + 3 * 2


def test_exit_codes(tmp_path):
    infeasible = tmp_path / "inf.gp"
    infeasible.write_text("var x\nmin x\nst x <= 1\nst 2 <= x\n")
    broken = tmp_path / "bad.gp"
    broken.write_text("var x\nmin x\nst x <=\n")
    assert _run("solve", str(infeasible))[0] == EXIT_INFEASIBLE
    assert _run("robustify", str(infeasible), "--method", "best-pairs")[0] == EXIT_INFEASIBLE
    code, _, err = _run("solve", str(broken))
    assert code == EXIT_ERROR and "line 3, column 8" in err
    assert _run("solve", str(tmp_path / "missing.gp"))[0] == EXIT_ERROR
    assert _run("solve", WING, "--bogus")[0] == EXIT_ERROR
    assert _run("robustify", WING, "--method", "nope")[0] == EXIT_ERROR
    assert _run("frobnicate", WING)[0] == EXIT_ERROR
