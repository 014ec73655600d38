"""Best Pairs: split large classes into robust two-term pairs and improve the pairing.

A class ``S`` is bounded by ``sum_pairs e^{z} <= e^{t}`` with each pair
robustified as a two-term posynomial; an odd class leaves one monomial as a
robust singleton.  Starting from a random pairing, each round re-pairs every
class by a minimum-weight perfect matching of the robust pair values at the
current solution and re-solves.  The current point stays feasible after a
re-pairing, so the objective cannot increase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..core import GeometricProgram
from ..partition import CategorizedProgram
from ..pwl import robustify_two_term, two_term_bound
from ..robust_lin import robust_value, robustify
from ..solver import SolveResult, Tolerances, solve
from ..uncertainty import PerturbationSet
from .common import BEST_PAIRS, RobustProgram, budget, prepare, start_program, var_term

EXACT_MATCHING_LIMIT = 16

Pairing = tuple[tuple[int, ...], ...]


def count_pairings(n: int) -> int:
    """Number of ways to split ``n`` items into pairs (plus one singleton if ``n`` is odd)."""
    if n < 0:
        raise ValueError("negative class size")
    if n % 2:
        return n * count_pairings(n - 1)
    return math.factorial(n) // (2 ** (n // 2) * math.factorial(n // 2))


def random_pairing(n: int, rng: np.random.Generator) -> Pairing:
    order = [int(i) for i in rng.permutation(n)]
    pairs = [tuple(sorted(order[i:i + 2])) for i in range(0, n - 1, 2)]
    if n % 2:
        pairs.append((order[-1],))
    return canonical(pairs)


def canonical(pairs) -> Pairing:
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


def min_weight_matching(n: int, pair_w, single_w=None) -> Pairing:
    """Minimum total weight pairing of ``0..n-1``.

    ``pair_w(i, j)`` weighs a pair; for odd ``n``, ``single_w(i)`` weighs the
    unpaired item.  Exact bitmask dynamic programming up to
    ``EXACT_MATCHING_LIMIT`` items, greedy beyond.
    """
    if n % 2 and single_w is None:
        raise ValueError("odd class needs a singleton weight")
    W = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(i + 1, n):
            W[i, j] = W[j, i] = pair_w(i, j)
    S = np.array([single_w(i) for i in range(n)]) if n % 2 else None
    if n <= EXACT_MATCHING_LIMIT:
        return _exact(n, W, S)
    return _greedy(n, W, S)


def _exact(n: int, W: np.ndarray, S) -> Pairing:
    full = (1 << n) - 1
    odd = n % 2 == 1

    @lru_cache(maxsize=None)
    def best(mask: int, single_left: bool) -> tuple[float, tuple]:
        if mask == full:
            return 0.0, ()
        i = (~mask & (mask + 1)).bit_length() - 1  # lowest unassigned item
        out = (math.inf, ())
        if single_left:
            c, rest = best(mask | (1 << i), False)
            out = min(out, (S[i] + c, ((i,),) + rest), key=lambda t: t[0])
        for j in range(i + 1, n):
            if not mask >> j & 1:
                c, rest = best(mask | (1 << i) | (1 << j), single_left)
                if W[i, j] + c < out[0]:
                    out = (W[i, j] + c, ((i, j),) + rest)
        return out

    return canonical(best(0, odd)[1])


def _greedy(n: int, W: np.ndarray, S) -> Pairing:
    left = set(range(n))
    pairs = []
    if S is not None:
        # leave out the item whose removal costs least relative to its cheapest partner
        k = int(np.argmin(S - np.min(W, axis=1)))
        pairs.append((k,))
        left.discard(k)
    order = sorted(((W[i, j], i, j) for i in left for j in left if i < j))
    for _, i, j in order:
        if i in left and j in left:
            pairs.append((i, j))
            left -= {i, j}
    return canonical(pairs)


def pairing_weight(members, pairing: Pairing, x, pset: PerturbationSet, r: int, safe: bool = True) -> float:
    return sum(math.exp(_block_value(members, pr, x, pset, r, safe)) for pr in pairing)


def _block_value(members, pr, x, pset, r, safe) -> float:
    if len(pr) == 1:
        return robust_value(members[pr[0]], x, pset)
    return two_term_bound(members[pr[0]], members[pr[1]], x, pset, r, safe)


def best_pairs_formulation(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet, r: int,
                           pairing: dict | None = None, seed: int | None = 0, safe: bool = True) -> RobustProgram:
    """Emit the Best Pairs program for a fixed pairing of every large class.

    ``pairing`` maps ``(i, j)`` to a pairing of class positions; missing
    entries are drawn at random from ``seed``.
    """
    if r < 2:
        raise ValueError("best pairs needs r >= 2")
    gp, cat = prepare(gp, pset)
    rng = np.random.default_rng(seed)
    prog = start_program(gp)
    chosen: dict = {}
    rp = RobustProgram(prog, BEST_PAIRS, pset, gp, r=r, pairing=chosen)
    for i, classes in enumerate(cat.classes):
        p = gp.inequalities[i]
        ts = []
        if len(classes) > 1:
            ts = [prog.new_var(f"c{i}_t{j}") for j in range(len(classes))]
            budget(prog, ts, None, ("budget", i))
        for j, cls in enumerate(classes):
            rhs = var_term(ts[j]) if ts else None
            members = [p[k] for k in cls]
            if len(cls) == 1:
                robustify(members[0], rhs, pset, prog, name=f"c{i}_{j}_w")
                value = (lambda m: lambda x: robust_value(m, x, pset))(members[0])
            elif len(cls) == 2:
                robustify_two_term(members[0], members[1], pset, r, safe, rhs, prog, name=f"c{i}_{j}")
                rp.pwl_blocks += 1
                value = (lambda ms: lambda x: two_term_bound(ms[0], ms[1], x, pset, r, safe))(members)
            else:
                pr = (pairing or {}).get((i, j)) or random_pairing(len(cls), rng)
                chosen[(i, j)] = canonical(pr)
                zs = []
                for b, blk in enumerate(chosen[(i, j)]):
                    z = prog.new_var(f"c{i}_{j}_z{b}")
                    zs.append(z)
                    value_of = (lambda blk, ms: lambda x: _block_value(ms, blk, x, pset, r, safe))(blk, members)
                    rp.completions.append((z, value_of))
                    if len(blk) == 1:
                        robustify(members[blk[0]], var_term(z), pset, prog, name=f"c{i}_{j}_{b}_w")
                    else:
                        robustify_two_term(members[blk[0]], members[blk[1]], pset, r, safe, var_term(z), prog,
                                           name=f"c{i}_{j}_{b}")
                        rp.pwl_blocks += 1
                budget(prog, zs, rhs, ("pairs", i, j))
                value = (lambda ms, pr: lambda x: math.log(pairing_weight(ms, pr, x, pset, r, safe)))(
                    members, chosen[(i, j)])
            if ts:
                rp.completions.append((ts[j], value))
    return rp


@dataclass
class DescentResult:
    robust: RobustProgram
    result: SolveResult
    trace: list[float] = field(default_factory=list)
    pairings: list[dict] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    failed: bool = False


def best_pairs(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet, r: int, max_iters: int = 20,
               seed: int | None = 0, samples: int | None = None, safe: bool = True,
               tol: Tolerances | None = None) -> DescentResult:
    """Random initial pairing, then matching-based re-pairing until it stops changing.

    ``samples`` switches the re-pairing step from exact matching to the best
    of that many random pairings (plus the current one).
    """
    gp, cat = prepare(gp, pset)
    rng = np.random.default_rng(seed)
    rp = best_pairs_formulation(cat, pset, r, seed=int(rng.integers(2**31)), safe=safe)
    res = solve(rp.program, None, tol)
    out = DescentResult(rp, res, pairings=[dict(rp.pairing)])
    if not res.ok:
        out.failed = True
        return out
    out.trace.append(res.objective)
    while out.iterations < max_iters:
        out.iterations += 1
        x = res.x
        new = {}
        changed = False
        for (i, j), current in rp.pairing.items():
            p = gp.inequalities[i]
            members = [p[k] for k in cat.classes[i][j]]
            cand = _repair(members, current, x, pset, r, safe, rng, samples)
            if cand != current and pairing_weight(members, cand, x, pset, r, safe) < \
                    pairing_weight(members, current, x, pset, r, safe) * (1 - 1e-12):
                changed = True
                new[(i, j)] = cand
            else:
                new[(i, j)] = current
        if not changed:
            out.converged = True
            break
        cand_rp = best_pairs_formulation(cat, pset, r, pairing=new, safe=safe)
        cand_res = solve(cand_rp.program, cand_rp.complete(x[: gp.num_vars]), tol)
        if not cand_res.ok:
            out.failed = True
            break
        if cand_res.objective > out.trace[-1]:
            # the re-paired program is no better within solver accuracy; keep the incumbent
            out.converged = True
            break
        rp, res = cand_rp, cand_res
        out.trace.append(res.objective)
        out.pairings.append(dict(rp.pairing))
    out.robust, out.result = rp, res
    return out


def _repair(members, current: Pairing, x, pset, r, safe, rng, samples) -> Pairing:
    n = len(members)
    if samples:
        pool = [current] + [random_pairing(n, rng) for _ in range(samples)]
        return min(pool, key=lambda pr: pairing_weight(members, pr, x, pset, r, safe))
    return min_weight_matching(
        n,
        lambda a, b: math.exp(_block_value(members, (a, b), x, pset, r, safe)),
        lambda a: math.exp(_block_value(members, (a,), x, pset, r, safe)),
    )


__all__ = [
    "DescentResult", "best_pairs", "best_pairs_formulation", "count_pairings", "min_weight_matching",
    "pairing_weight", "random_pairing",
]
