"""Command-line entry point: ``robustgp <command> <model.gp> [options]``.

Commands
    solve       nominal solve; prints ``objective = <value>``
    robustify   one robust formulation; JSON with program stats and the solution
    simulate    Monte Carlo failure estimate of a design; JSON report
    sweep       Gamma sweep over methods; CSV
    compare     all methods at one Gamma plus the conservativeness audit

Exit codes: 0 success, 2 infeasible, 1 any other error (bad flags, unreadable
files, parse errors, numerical failure, failed audit).  Output goes to
``--output`` when given, else stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from ..core import GeometricProgram
from ..formulations import conservativeness_audit, robust_solve
from ..program import from_gp
from ..simulate import CSV_HEADER, gamma_sweep, simulate
from ..solver import INFEASIBLE, OPTIMAL, Tolerances, solve
from ..uncertainty import PerturbationSet, propagate_parameters
from .config import ConfigError, RunConfig, build_config, normalize_key, parse_config, parse_grid
from .modelfile import (Constraint, ModelFile, ModelSyntaxError, format_model, load_model, model_to_file,
                        parse_model, same_structure)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

_OPTIONS = {
    "method": str, "set": str, "gamma": float, "gammas": str, "methods": str, "r": int, "gap-tol": float,
    "r-cap": int, "samples": int, "sim-gamma": float, "seed": int, "max-iters": int, "feas-tol": float,
    "opt-tol": float, "output": str, "design-from": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustgp", description="Robust geometric programming toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("solve", "robustify", "simulate", "sweep", "compare"):
        p = sub.add_parser(name)
        p.add_argument("model", help="model file")
        p.add_argument("--config", help="flat key=value config file")
        for opt, typ in _OPTIONS.items():
            p.add_argument(f"--{opt}", type=typ, default=None)
    return parser


def _config(args) -> RunConfig:
    file_values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_values = parse_config(fh.read())
    overrides = {normalize_key(k): getattr(args, k.replace("-", "_")) for k in _OPTIONS
                 if getattr(args, k.replace("-", "_")) is not None}
    return build_config(file_values, overrides)


def _tolerances(cfg: RunConfig) -> Tolerances:
    return Tolerances(feas=cfg.feas_tol, opt=cfg.opt_tol)


def _emit(text: str, cfg: RunConfig, out) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, np.generic):
            return clean(v.item())
        return v
    return json.dumps(clean(obj), indent=2) + "\n"


def _status_code(status: str) -> int:
    return EXIT_OK if status == OPTIMAL else EXIT_INFEASIBLE if status == INFEASIBLE else EXIT_ERROR


def _named(gp: GeometricProgram, x) -> dict:
    return {name: math.exp(float(x[j])) for j, name in enumerate(gp.var_names)}


def _result_json(res, cfg: RunConfig) -> dict:
    gp = res.robust.gp
    return {
        "method": res.method, "set": res.pset.kind, "gamma": res.pset.gamma, "status": res.status,
        "objective": res.objective, "r": res.r, "gap": res.gap, "n_constraints": res.n_constraints,
        "n_variables": res.robust.program.num_vars, "kind": res.kind, "wall_ms": res.wall_ms,
        "variables": _named(gp, res.x) if res.ok else None,
        "design": {gp.var_names[j]: math.exp(v) for j, v in res.design().items()} if res.ok else None,
        "trace": [math.exp(v) for v in res.trace], "seed": cfg.seed,
    }


def _robust(gp, cfg: RunConfig, method: str, gamma: float):
    pset = PerturbationSet(cfg.set, gamma)
    return robust_solve(gp, method, pset, r=cfg.r, gap_tol=cfg.gap_tol, r_cap=cfg.r_cap, seed=cfg.seed,
                        max_iters=cfg.max_iters, tol=_tolerances(cfg))


def cmd_solve(gp, cfg, out) -> int:
    res = solve(from_gp(gp, nominal=True), None, _tolerances(cfg))
    if not res.ok:
        out.write(f"status = {res.status}\n")
        return _status_code(res.status)
    lines = [f"objective = {res.cost!r}"] + [f"{k} = {v!r}" for k, v in _named(gp, res.x).items()]
    _emit("\n".join(lines) + "\n", cfg, out)
    return EXIT_OK


def cmd_robustify(gp, cfg, out) -> int:
    if cfg.method == "nominal":
        raise ConfigError("robustify needs a robust method")
    res = _robust(gp, cfg, cfg.method, cfg.gamma)
    _emit(_json(_result_json(res, cfg)), cfg, out)
    return _status_code(res.status)


def cmd_simulate(gp, cfg, out) -> int:
    sim_set = PerturbationSet(cfg.set, cfg.gamma if cfg.sim_gamma is None else cfg.sim_gamma)
    if cfg.method == "nominal":
        res = solve(from_gp(gp, nominal=True), None, _tolerances(cfg))
        if not res.ok:
            return _status_code(res.status)
        design, info = res.x[: gp.num_vars], {"method": "nominal", "objective": res.cost}
    else:
        rob = _robust(gp, cfg, cfg.method, cfg.gamma)
        if not rob.ok:
            _emit(_json({"method": rob.method, "status": rob.status}), cfg, out)
            return _status_code(rob.status)
        design, info = rob, {"method": rob.method, "objective": rob.objective}
    rep = simulate(gp, design, sim_set, cfg.samples, cfg.seed, keep_records=False)
    body = {**info, "set": cfg.set, "gamma": cfg.gamma, "sim_gamma": sim_set.gamma, "seed": cfg.seed,
            **rep.to_dict()}
    _emit(_json(body), cfg, out)
    return EXIT_OK


def cmd_sweep(gp, cfg, out) -> int:
    sw = gamma_sweep(gp, cfg.methods.split(","), cfg.set, cfg.grid(), gap_tol=cfg.gap_tol, n_samples=cfg.samples,
                     seed=cfg.seed, sim_gamma=cfg.sim_gamma, r=cfg.r, max_iters=cfg.max_iters)
    _emit(sw.csv(), cfg, out)
    return EXIT_OK if all(c.status == OPTIMAL for c in sw.cells) else EXIT_INFEASIBLE \
        if any(c.status == INFEASIBLE for c in sw.cells) else EXIT_ERROR


def cmd_compare(gp, cfg, out) -> int:
    results = {}
    for m in cfg.methods.split(","):
        results[m] = _robust(gp, cfg, m, cfg.gamma)
    bad = [r for r in results.values() if not r.ok]
    body = {"set": cfg.set, "gamma": cfg.gamma, "methods": [_result_json(r, cfg) for r in results.values()]}
    if bad:
        _emit(_json(body), cfg, out)
        return max(_status_code(r.status) for r in bad)
    try:
        audit = conservativeness_audit(results)
        body["audit"] = {"passed": audit.passed, "checks": audit.lines()}
    except KeyError:
        audit = None
        body["audit"] = None
    _emit(_json(body), cfg, out)
    return EXIT_OK if audit is None or audit.passed else EXIT_ERROR


COMMANDS = {"solve": cmd_solve, "robustify": cmd_robustify, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "compare": cmd_compare}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        gp = propagate_parameters(load_model(args.model).to_model())
        return COMMANDS[args.command](gp, cfg, out)
    except ModelSyntaxError as exc:
        err.write(f"{getattr(args, 'model', '')}: {exc}\n")
    except (ConfigError, OSError, ValueError, KeyError) as exc:
        err.write(f"error: {exc}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


__all__ = [
    "CSV_HEADER", "COMMANDS", "Constraint", "ConfigError", "EXIT_ERROR", "EXIT_INFEASIBLE", "EXIT_OK", "ModelFile",
    "ModelSyntaxError", "RunConfig", "build_config", "format_model", "load_model", "main", "model_to_file",
    "parse_config", "parse_grid", "parse_model", "run", "same_structure",
]
