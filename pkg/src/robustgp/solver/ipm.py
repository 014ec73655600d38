"""Primal log-barrier interior-point method for log-sum-exp and SOC constraints.

The barrier is ``-sum log(-f_i(x)) - sum log(s_j^2 - ||u_j||^2)`` where
``f_i`` are log-sum-exp constraint functions and ``||u_j|| <= s_j`` are the
second-order cones.  Centering uses damped Newton steps with backtracking;
the barrier weight grows by ``mu`` until ``m/t`` falls below the gap target.
Phase I minimizes a common slack added to every constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..program import LogSumExp, Program, SecondOrderCone, SignomialLe

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
MAX_ITER = "MaxIter"
NUMERICAL_FAILURE = "NumericalFailure"

DENSE_LIMIT = 400
UNBOUNDED_LIMIT = 1e6
# every log-space variable is confined to |x_j| <= BOX_RADIUS so that barrier
# subproblems have bounded level sets; touching the box means "unbounded"
BOX_RADIUS = 250.0


@dataclass
class Tolerances:
    feas: float = 1e-8
    opt: float = 1e-9
    infeas: float = 1e-6
    sp: float = 1e-5
    sp_max_iter: int = 50
    max_newton: int = 800
    mu: float = 10.0


@dataclass
class SolveResult:
    status: str
    x: np.ndarray | None = None
    objective: float = math.nan
    iterations: int = 0
    residual: float = math.nan
    gap: float = math.nan
    message: str = ""
    history: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    @property
    def cost(self) -> float:
        """Original-space objective ``exp(objective)``."""
        return math.exp(self.objective) if self.ok else math.nan


class _Unbounded(Exception):
    pass


class Compiled:
    """Array form of a program's convex constraints."""

    def __init__(self, n: int, c: np.ndarray, c0: float, rows, cols, vals, b, starts, socs):
        self.n = n
        self.c = c
        self.c0 = c0
        rows, cols, vals, b, starts = list(rows), list(cols), list(vals), list(b), list(starts)
        self.n_data = len(b)
        T = len(b)
        for j in range(n):
            for sign in (1.0, -1.0):
                starts.append(T)
                rows.append(T)
                cols.append(j)
                vals.append(sign)
                b.append(-BOX_RADIUS)
                T += 1
        self.T = T
        self.m = len(starts)
        self.b = np.asarray(b, dtype=float)
        self.starts = np.asarray(starts, dtype=np.int64)
        counts = np.diff(np.append(self.starts, T))
        self.grp = np.repeat(np.arange(self.m), counts)
        self.single = bool(np.all(counts == 1)) if self.m else True
        self.dense = n <= DENSE_LIMIT
        A = sp.csr_matrix((vals, (rows, cols)), shape=(T, n))
        self.A = A.toarray() if self.dense else A
        self.At = None if self.dense else A.T.tocsr()
        self.socs = socs
        self.nu = self.m + 2 * len(socs)

    @classmethod
    def from_program(cls, prog: Program, n_extra: int = 0) -> "Compiled":
        n = prog.num_vars
        rows, cols, vals, b, starts, socs = [], [], [], [], [], []
        T = 0
        for con in prog.constraints:
            if isinstance(con, LogSumExp):
                starts.append(T)
                for term in con.terms:
                    for j, v in term.a0.items():
                        rows.append(T)
                        cols.append(j)
                        vals.append(v)
                    b.append(term.b0)
                    T += 1
            elif isinstance(con, SecondOrderCone):
                M = np.zeros((len(con.rows), n))
                q = np.zeros(len(con.rows))
                for l, r in enumerate(con.rows):
                    for j, v in r.a0.items():
                        M[l, j] = v
                    q[l] = r.b0
                cvec = np.zeros(n)
                for j, v in con.lin.a0.items():
                    cvec[j] = v
                socs.append((M, q, cvec, con.lin.b0))
            elif isinstance(con, SignomialLe):
                raise TypeError("signomial constraints need solve_signomial")
            else:
                raise TypeError(f"unknown constraint {con!r}")
        c = np.zeros(n)
        for j, v in prog.objective.a0.items():
            c[j] = v
        return cls(n, c, prog.objective.b0, rows, cols, vals, b, starts, socs)

    def with_slack(self) -> "Compiled":
        """Phase-I copy: an extra variable ``s`` subtracted from every constraint.

        The row ``-s - 1 <= 0`` keeps the phase-I problem bounded.
        """
        new = object.__new__(Compiled)
        new.__dict__.update(self.__dict__)
        new.n = self.n + 1
        col = -np.ones((self.T, 1))
        floor = np.zeros((1, new.n))
        floor[0, -1] = -1.0
        if self.dense:
            new.A = np.vstack([np.hstack([self.A, col]), floor])
        else:
            new.A = sp.vstack([sp.hstack([self.A, sp.csr_matrix(col)]), sp.csr_matrix(floor)]).tocsr()
            new.At = new.A.T.tocsr()
        new.b = np.append(self.b, -1.0)
        new.starts = np.append(self.starts, self.T).astype(np.int64)
        new.grp = np.append(self.grp, self.m)
        new.T = self.T + 1
        new.m = self.m + 1
        new.nu = self.nu + 1
        new.socs = [(np.hstack([M, np.zeros((M.shape[0], 1))]), q, np.append(cv, -1.0), d)
                    for M, q, cv, d in self.socs]
        new.c = np.zeros(new.n)
        new.c[-1] = 1.0
        new.c0 = 0.0
        return new

    def with_data(self, b_data: np.ndarray, c0: float | None = None) -> "Compiled":
        """Same structure, new log coefficients for the data rows."""
        new = object.__new__(Compiled)
        new.__dict__.update(self.__dict__)
        new.b = self.b.copy()
        new.b[: self.n_data] = b_data
        if c0 is not None:
            new.c0 = c0
        return new

    def shifted(self, delta: float) -> "Compiled":
        """Copy with every constraint relaxed by ``delta``."""
        new = object.__new__(Compiled)
        new.__dict__.update(self.__dict__)
        new.b = self.b - delta
        new.socs = [(M, q, cv, d - delta) for M, q, cv, d in self.socs]
        return new

    # evaluation -------------------------------------------------------------
    def _lse(self, x):
        y = self.A @ x + self.b
        if self.single:
            return y, None
        ymax = np.maximum.reduceat(y, self.starts)
        e = np.exp(y - ymax[self.grp])
        s = np.add.reduceat(e, self.starts)
        f = ymax + np.log(s)
        return f, e / s[self.grp]

    def constraint_values(self, x) -> np.ndarray:
        vals = []
        if self.m:
            vals.append(self._lse(x)[0])
        for M, q, cv, d in self.socs:
            vals.append(np.array([np.linalg.norm(M @ x + q) + cv @ x + d]))
        return np.concatenate(vals) if vals else np.zeros(0)

    def max_violation(self, x) -> float:
        v = self.constraint_values(x)
        return float(v.max()) if v.size else -np.inf

    def barrier_value(self, x) -> float:
        total = 0.0
        if self.m:
            f = self._lse(x)[0]
            if not np.all(f < 0):
                return np.inf
            total -= np.log(-f).sum()
        for M, q, cv, d in self.socs:
            u = M @ x + q
            s = -(cv @ x + d)
            D = s * s - u @ u
            if s <= 0 or D <= 0:
                return np.inf
            total -= math.log(D)
        return total

    def barrier_derivs(self, x):
        n = self.n
        g = np.zeros(n)
        if self.dense:
            H = np.zeros((n, n))
        else:
            H = sp.csr_matrix((n, n))
        if self.m:
            f, p = self._lse(x)
            w = 1.0 / (-f)
            A = self.A
            if self.single:
                g += A.T @ w if self.dense else self.At @ w
                d = w * w
                if self.dense:
                    H += A.T @ (d[:, None] * A)
                else:
                    H = H + self.At @ sp.diags(d) @ A
            else:
                pw = p * w[self.grp]
                if self.dense:
                    g += A.T @ pw
                    G = np.add.reduceat(p[:, None] * A, self.starts, axis=0)
                    H += A.T @ (pw[:, None] * A) + G.T @ ((w * w - w)[:, None] * G)
                else:
                    g += self.At @ pw
                    P = sp.csr_matrix((p, (self.grp, np.arange(self.T))), shape=(self.m, self.T))
                    G = (P @ A).tocsr()
                    H = H + self.At @ sp.diags(pw) @ A + G.T @ sp.diags(w * w - w) @ G
        for M, q, cv, dd in self.socs:
            u = M @ x + q
            s = -(cv @ x + dd)
            D = s * s - u @ u
            v = s * cv + M.T @ u
            g += 2.0 * v / D
            Hs = (2.0 * (M.T @ M) - 2.0 * np.outer(cv, cv)) / D + 4.0 * np.outer(v, v) / (D * D)
            H = H + (Hs if self.dense else sp.csr_matrix(Hs))
        return g, H


def _newton_solve(H, rhs, dense: bool):
    if dense:
        d = np.sqrt(np.abs(np.diag(H)))
        d[d == 0] = 1.0
        Hs = H / d[:, None] / d[None, :]
        Hs[np.diag_indices_from(Hs)] += 1e-13
        try:
            return np.linalg.solve(Hs, rhs / d) / d
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(Hs, rhs / d, rcond=None)[0] / d
    H = H.tocsc()
    d = np.sqrt(np.abs(H.diagonal()))
    d[d == 0] = 1.0
    Dinv = sp.diags(1.0 / d)
    Hs = (Dinv @ H @ Dinv + 1e-13 * sp.identity(H.shape[0])).tocsc()
    # minimum degree on the symmetric pattern keeps fill far below the default column ordering
    lu = spla.splu(Hs, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    return lu.solve(rhs / d) / d


def _center(prob: Compiled, x: np.ndarray, t: float, budget: list, stop=None,
            alpha: float = 0.01, beta: float = 0.5, tol: float = 1e-10):
    """Newton centering of ``t*c.x + barrier``; ``budget[0]`` counts remaining steps."""
    fx = t * (prob.c @ x) + prob.barrier_value(x)
    while budget[0] > 0:
        g, H = prob.barrier_derivs(x)
        grad = t * prob.c + g
        dx = _newton_solve(H, -grad, prob.dense)
        lam2 = -grad @ dx
        if not np.isfinite(lam2):
            raise FloatingPointError("non-finite Newton decrement")
        # relative floor: below it the decrement is dominated by roundoff in t*c.x
        if lam2 / 2.0 <= max(tol, 1e-13 * abs(fx)):
            return x, True
        budget[0] -= 1
        step = 1.0
        slope = grad @ dx
        while True:
            xn = x + step * dx
            fn = t * (prob.c @ xn) + prob.barrier_value(xn)
            if np.isfinite(fn) and fn <= fx + alpha * step * slope:
                break
            step *= beta
            if step < 1e-16:
                return x, True
        stalled = fx - fn <= 1e-14 * (1.0 + abs(fx))
        x, fx = xn, fn
        if stalled:
            return x, True
        if np.max(np.abs(x)) > UNBOUNDED_LIMIT:
            raise _Unbounded()
        if stop is not None and stop(x):
            return x, True
    return x, False


def _barrier(prob: Compiled, x: np.ndarray, gap: float, mu: float, budget: list, stop=None, t0: float = 1.0):
    t = t0
    while True:
        x, done = _center(prob, x, t, budget, stop)
        if not done:
            return x, t, MAX_ITER
        if stop is not None and stop(x):
            return x, t, "stopped"
        if prob.nu / t < gap:
            return x, t, OPTIMAL
        t *= mu


def phase_one(prob: Compiled, x0: np.ndarray, tol: Tolerances, budget: list):
    """Find a strictly feasible point.

    Returns ``(x, s)`` where ``s`` is the best common slack found.  A strictly
    negative ``s`` certifies strict feasibility; ``s`` above ``tol.infeas`` with
    the barrier lower bound also above it certifies infeasibility.
    """
    aug = prob.with_slack()
    s0 = prob.max_violation(x0)
    z = np.append(x0, max(s0, 0.0) + 1.0)
    margin = 1e-7
    lower = [-np.inf]

    def stop(z):
        return z[-1] < -margin

    t = 1.0
    while True:
        try:
            z, done = _center(aug, z, t, budget, stop)
        except _Unbounded:
            return z[:-1], z[-1], -np.inf
        if stop(z):
            return z[:-1], z[-1], -np.inf
        if not done:
            return z[:-1], z[-1], lower[0]
        lower[0] = z[-1] - aug.nu / t
        if lower[0] > tol.infeas:
            return z[:-1], z[-1], lower[0]
        if aug.nu / t < 1e-10:
            return z[:-1], z[-1], lower[0]
        t *= tol.mu


def solve_compiled(prob: Compiled, tol: Tolerances | None = None, x0=None) -> SolveResult:
    tol = tol or Tolerances()
    x = np.zeros(prob.n) if x0 is None else np.clip(np.asarray(x0, dtype=float), -0.9 * BOX_RADIUS, 0.9 * BOX_RADIUS)
    budget = [tol.max_newton]
    residual = 0.0
    work = prob
    try:
        # a start hugging the boundary would overflow the barrier Hessian; demand a real margin
        if prob.nu and not (prob.max_violation(x) < -tol.feas and np.isfinite(prob.barrier_value(x))):
            x, s, lower = phase_one(prob, x, tol, budget)
            if s >= 0:
                if lower > tol.infeas or s > tol.infeas:
                    if budget[0] <= 0 and lower <= tol.infeas:
                        return SolveResult(MAX_ITER, x, iterations=tol.max_newton - budget[0],
                                           residual=s, message="phase I did not finish")
                    return SolveResult(INFEASIBLE, x, iterations=tol.max_newton - budget[0], residual=s,
                                       message=f"phase I slack {s:.3g}")
                # feasible set has (almost) empty interior: relax by the slack found
                residual = s
                work = prob.shifted(s + 1e-9)
        if work.nu == 0:
            if np.any(work.c != 0):
                return SolveResult(NUMERICAL_FAILURE, x, message="unbounded objective")
            return SolveResult(OPTIMAL, x, objective=float(work.c0), residual=-np.inf, gap=0.0)
        x, t, status = _barrier(work, x, tol.opt, tol.mu, budget)
    except _Unbounded:
        return SolveResult(NUMERICAL_FAILURE, x, iterations=tol.max_newton - budget[0], message="unbounded")
    except (FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        return SolveResult(NUMERICAL_FAILURE, x, iterations=tol.max_newton - budget[0], message=str(exc))
    iters = tol.max_newton - budget[0]
    if np.any(np.abs(x) > BOX_RADIUS - 1.0):
        return SolveResult(NUMERICAL_FAILURE, x, iterations=iters, message="unbounded")
    viol = prob.max_violation(x)
    res = SolveResult(status, x, objective=float(prob.c @ x + prob.c0), iterations=iters,
                      residual=max(viol, residual) if residual else viol, gap=work.nu / t)
    if status == OPTIMAL and viol > tol.feas:
        res.status = NUMERICAL_FAILURE
        res.message = f"final violation {viol:.3g}"
    return res


def solve_convex(prog: Program, tol: Tolerances | None = None, x0=None) -> SolveResult:
    """Solve a program made of log-sum-exp and second-order-cone constraints."""
    return solve_compiled(Compiled.from_program(prog), tol, x0)
