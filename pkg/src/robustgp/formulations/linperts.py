"""Linearized Perturbations: bound each uncertain monomial factor by a half-space.

Within a class of three or more dependent monomials, term ``k`` equals
``v_k(x) * exp(sum_l b_kl zeta_l)`` with ``v_k`` certain.  After scaling each
coordinate to the unit box the exponential factor is convex, so a plane that
dominates it at the box vertices dominates it everywhere on the box:
``exp(b_k . zeta') <= f_k . zeta' + g_k``.  The class is then bounded by
``sum_k g_k v_k + max_zeta' sum_l zeta'_l (sum_k f_kl v_k)``, which is linear
in the certain monomials ``v_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import AffineData, GeometricProgram
from ..partition import CategorizedProgram
from ..program import LogSumExp, SignomialLe
from ..pwl import robustify_two_term
from ..robust_lin import robust_value, robustify
from ..uncertainty import PerturbationSet
from .common import LINPERTS, RobustProgram, budget, lse_value, prepare, start_program, var_term

MAX_ENUMERATED = 20


@dataclass(frozen=True)
class HalfSpace:
    """``f . zeta + g >= exp(b . zeta)`` on the unit box."""

    f: np.ndarray
    g: float
    exact_fit: bool = True

    def __call__(self, zeta) -> float:
        return float(np.dot(self.f, zeta) + self.g)


def _vertices(n: int, chunk: int = 1 << 16):
    total = 1 << n
    bits = np.arange(n)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        yield ((idx[:, None] >> bits) & 1) * 2.0 - 1.0


def build_half_space(b) -> HalfSpace:
    """Least-squares plane over the unit-box vertices through the extreme vertices.

    The normal equations are closed form because the vertex matrix has
    orthogonal columns: ``sum_v v_l E(v) = 2 sinh(b_l) prod_{j != l} 2 cosh(b_j)``.
    The fit is then certified at every vertex and lifted if needed.  Beyond
    ``MAX_ENUMERATED`` coordinates the constant bound ``exp(sum |b|)`` is used.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    if n == 0 or not np.any(b):
        return HalfSpace(np.zeros(n), 1.0)
    if n > MAX_ENUMERATED:
        return HalfSpace(np.zeros(n), float(np.exp(np.abs(b).sum())), exact_fit=False)
    # work with log-scale products to stay finite for large |b|
    logc = np.log(2.0 * np.cosh(b))
    total = logc.sum()
    N = 2.0 ** n
    mean_E = math.exp(total - n * math.log(2.0))
    cov = np.tanh(b) * mean_E  # (1/N) sum_v v_l E(v)
    # minimize ||X th - E||^2 subject to equality at the max and min vertex;
    # X^T X = N I, so th = (X^T E - C^T lam) / N with lam from the 2x2 system
    s = np.where(b >= 0, 1.0, -1.0)
    C = np.array([np.append(s, 1.0), np.append(-s, 1.0)])
    d = np.array([math.exp(np.abs(b).sum()), math.exp(-np.abs(b).sum())])
    xte = np.append(cov, mean_E) * N
    lam = np.linalg.solve(C @ C.T / N, C @ xte / N - d)
    th = (xte - C.T @ lam) / N
    f, g = th[:-1], float(th[-1])
    worst = 0.0
    for V in _vertices(n):
        worst = max(worst, float(np.max(np.exp(V @ b) - (V @ f + g))))
    if worst > 0:
        g += worst * (1 + 1e-12)
    return HalfSpace(f, g)


def linearized_perturbations(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet, r: int = 0,
                             safe: bool = True) -> RobustProgram:
    """Categorized form with half-space bounds on classes of three or more terms.

    Two-term classes use the robust piecewise-linear machinery (needs ``r``);
    single monomials are robustified exactly.
    """
    gp, cat = prepare(gp, pset)
    prog = start_program(gp)
    rp = RobustProgram(prog, LINPERTS, pset, gp, r=r)
    for i, classes in enumerate(cat.classes):
        p = gp.inequalities[i]
        if len(classes) > 1:
            ts = []
            for j, cls in enumerate(classes):
                t = prog.new_var(f"c{i}_t{j}")
                ts.append(t)
            budget(prog, ts, None, ("budget", i))
        for j, cls in enumerate(classes):
            rhs = var_term(ts[j]) if len(classes) > 1 else None
            members = [p[k] for k in cls]
            if len(cls) == 1:
                robustify(members[0], rhs, pset, prog, name=f"c{i}_{j}_w")
                value = _monomial_value(members[0], pset)
            elif len(cls) == 2:
                if r < 2:
                    raise ValueError("two-term classes need r >= 2")
                robustify_two_term(members[0], members[1], pset, r, safe, rhs, prog, name=f"c{i}_{j}")
                rp.pwl_blocks += 1
                value = _pair_value(members, pset)
            else:
                value = _emit_class(rp, members, pset, rhs, f"c{i}_{j}")
            if len(classes) > 1:
                rp.completions.append((ts[j], value))
    return rp


def _monomial_value(m, pset):
    return lambda x: robust_value(m, x, pset)


def _pair_value(members, pset):
    return lambda x: lse_value([robust_value(m, x, pset) for m in members])


def _emit_class(rp: RobustProgram, members, pset: PerturbationSet, rhs, name: str):
    if any(m.a_cols for m in members):
        raise ValueError("linearized perturbations need coefficient-only uncertainty in large classes")
    prog = rp.program
    rhs = rhs or AffineData()
    coords = sorted(set().union(*(m.support for m in members)))
    scale = {l: pset.gamma * pset.sigma_of(l) for l in coords}
    v = [m.nominal() for m in members]
    g = []
    F = np.zeros((len(members), len(coords)))
    for k, m in enumerate(members):
        own = sorted(m.support)
        hs = build_half_space([m.b_cols[l] * scale[l] for l in own])
        g.append(hs.g)
        for l, fl in zip(own, hs.f):
            F[k, coords.index(l)] = fl
    source = ("halfspace", name)
    main = [v[k].shifted(math.log(g[k])) for k in range(len(members))]
    completions = []
    # a coordinate column u_l = sum_k F[k, l] v_k enters through |u_l| (box) or ||u|| (ellipse)
    cols = [c for c in range(len(coords)) if np.any(F[:, c] != 0)]
    if pset.is_box:
        extra: dict[int, float] = {}
        for c in cols:
            signs = np.sign(F[:, c][F[:, c] != 0])
            if np.all(signs == signs[0]):
                for k in np.nonzero(F[:, c])[0]:
                    extra[k] = extra.get(k, 0.0) + abs(F[k, c])
            else:
                w = prog.new_var(f"{name}_w{coords[c]}")
                main.append(var_term(w))
                _abs_bound(prog, F[:, c], v, var_term(w), source)
                completions.append((w, _abs_completion(F[:, c], v)))
        for k, e in extra.items():
            main[k] = v[k].shifted(math.log(g[k] + e))
        prog.add(LogSumExp(tuple(t - rhs for t in main)), source)
    else:
        if cols:
            s0 = prog.new_var(f"{name}_norm")
            main.append(var_term(s0))
            norm_terms = []
            for c in cols:
                nz = np.nonzero(F[:, c])[0]
                if len(nz) == 1:
                    k = nz[0]
                    norm_terms.append(v[k].shifted(math.log(abs(F[k, c]))).scaled(2.0))
                else:
                    w = prog.new_var(f"{name}_w{coords[c]}")
                    completions.append((w, _abs_completion(F[:, c], v)))
                    norm_terms.append(var_term(w).scaled(2.0))
                    _abs_bound(prog, F[:, c], v, var_term(w), source)
            completions.append((s0, _norm_completion(norm_terms)))
            prog.add(LogSumExp(tuple(t - var_term(s0).scaled(2.0) for t in norm_terms)), source)
        prog.add(LogSumExp(tuple(t - rhs for t in main)), source)
    rp.completions.extend(completions)
    return lambda x: lse_value([t.value(x) for t in main])


def _abs_bound(prog, fcol, v, w: AffineData, source) -> None:
    """``|sum_k f_k v_k| <= e^w``: a posynomial bound when signs agree, else two signomial ones."""
    pos = [v[k].shifted(math.log(fcol[k])) for k in range(len(v)) if fcol[k] > 0]
    neg = [v[k].shifted(math.log(-fcol[k])) for k in range(len(v)) if fcol[k] < 0]
    for lhs, other in ((pos, neg), (neg, pos)):
        if not lhs:
            continue
        if other:
            prog.add(SignomialLe(tuple(lhs), (w, *other)), source)
        else:
            prog.add(LogSumExp(tuple(t - w for t in lhs)), source)


def _abs_completion(fcol, v):
    def fn(x):
        u = sum(fcol[k] * math.exp(v[k].value(x)) for k in range(len(v)) if fcol[k] != 0)
        return math.log(max(abs(u), 1e-300)) + 1e-6
    return fn


def _norm_completion(terms):
    def fn(x):
        return 0.5 * lse_value([t.value(x) for t in terms]) + 1e-6
    return fn
