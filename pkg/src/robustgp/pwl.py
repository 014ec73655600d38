"""Best r-piece convex piecewise-linear bounds of ``phi(x) = log(1 + e^x)``.

The lower bound is a maximum of ``r`` lines: ``0``, ``r - 2`` tangents of
``phi`` and ``x``.  It is optimal when its error reaches the same value
``eps_r`` at every breakpoint, so the construction sweeps left to right for a
candidate error and bisects on it until the sweep closes exactly on ``y = x``.
Adding ``eps_r`` gives the matching upper bound.

For a two-term posynomial ``log(e^y1 + e^y2) = y1 + phi(y2 - y1)``, piece ``i``
becomes ``(1 - a_i) y1 + a_i y2 + b_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .core import AffineData
from .program import Program
from .robust_lin import RobustLinearResult, robust_value, robustify
from .uncertainty import PerturbationSet

# phi(x) and max(0, x) differ by less than 1e-17 beyond this
TRUNCATION = 40.0


def phi(x):
    return np.logaddexp(0.0, x)


def _sigmoid(x: float) -> float:
    return 0.5 * (1.0 + math.tanh(0.5 * x))


def _phi(x: float) -> float:
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


@dataclass(frozen=True)
class PwlApprox:
    r: int
    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]
    breakpoints: tuple[float, ...]
    tangent_points: tuple[float, ...]
    eps: float

    def lower(self, x):
        x = np.asarray(x, dtype=float)
        return np.max(np.multiply.outer(x, self.slopes) + np.asarray(self.intercepts), axis=-1)

    def upper(self, x):
        return self.lower(x) + self.eps

    def two_term_lower(self, y1, y2):
        """Lower bound of ``log(e^y1 + e^y2)``."""
        y1 = np.asarray(y1, dtype=float)
        return y1 + self.lower(np.asarray(y2, dtype=float) - y1)


def _tangent_through(xb: float, yb: float) -> float | None:
    """Tangent point right of ``xb`` whose tangent line passes through ``(xb, yb)``."""

    def f(t):
        return _phi(t) + _sigmoid(t) * (xb - t) - yb

    hi = max(xb, 0.0) + 1.0
    while f(hi) > 0:
        hi = 2 * hi + 1.0
        if hi > 4 * TRUNCATION:
            return None
    return brentq(f, xb, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def _error_reaches(a: float, c: float, start: float, eps: float) -> float:
    """First ``x > start`` with ``phi(x) - (a x + c) = eps``."""

    def g(x):
        return _phi(x) - (a * x + c) - eps

    hi = start + 1.0
    while g(hi) < 0:
        hi = start + 2 * (hi - start)
    return brentq(g, start, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def _sweep(eps: float, n_tangents: int):
    """Place ``n_tangents`` tangents for error ``eps``.

    Returns ``(residual, lines, breakpoints, tangents)``; the residual is the
    error at the junction with ``y = x`` minus ``eps`` (positive when ``eps`` is
    too small), or ``-inf`` when ``y = x`` is reached early.
    """
    lines = [(0.0, 0.0)]
    bps: list[float] = []
    tans: list[float] = []
    xb = math.log(math.expm1(eps))
    for _ in range(n_tangents):
        bps.append(xb)
        t = _tangent_through(xb, _phi(xb) - eps)
        if t is None:
            return -math.inf, lines, bps, tans
        a = _sigmoid(t)
        c = _phi(t) - a * t
        if a >= 1.0:
            return -math.inf, lines, bps, tans
        tans.append(t)
        lines.append((a, c))
        xb = _error_reaches(a, c, t, eps)
    a, c = lines[-1]
    x_end = c / (1.0 - a)
    bps.append(x_end)
    return (_phi(x_end) - x_end) - eps, lines, bps, tans


def _half_residual(eps: float, r: int) -> float:
    """Signed miss of the symmetric midpoint after sweeping half the pieces.

    The optimal approximation is mirror-symmetric about 0: for odd ``r`` the
    middle tangent touches at 0, for even ``r`` the middle breakpoint sits at
    0.  The residual is increasing in ``eps``.
    """
    n_before = (r - 3) // 2 if r % 2 else (r - 2) // 2
    xb = math.log(math.expm1(eps))
    t = None
    for _ in range(n_before):
        t = _tangent_through(xb, _phi(xb) - eps)
        if t is None:
            return math.inf
        a = _sigmoid(t)
        xb = _error_reaches(a, _phi(t) - a * t, t, eps)
    if r % 2:
        t = _tangent_through(xb, _phi(xb) - eps)
        return math.inf if t is None else t
    return xb


@lru_cache(maxsize=None)
def build_pwl(r: int) -> PwlApprox:
    """Best ``r``-piece lower approximation of ``phi``; cached per ``r``."""
    if r < 2:
        raise ValueError("a piecewise-linear approximation needs r >= 2")
    if r == 2:
        return PwlApprox(2, (0.0, 1.0), (0.0, 0.0), (0.0,), (), math.log(2.0))
    guess = math.log(2.0) / (r - 1) ** 2
    lo, hi = 0.5 * guess, min(3.0 * guess, math.log(2.0))
    while _half_residual(lo, r) > 0:
        lo *= 0.5
    while not 0 < _half_residual(hi, r) < math.inf:
        hi = 0.5 * (hi + lo) if _half_residual(hi, r) == math.inf else min(2 * hi, math.log(2.0))
    eps = brentq(lambda e: _half_residual(e, r), lo, hi, xtol=1e-17, rtol=1e-15, maxiter=200)
    _, lines, bps, tans = _sweep(eps, r - 2)
    lines.append((1.0, 0.0))
    return PwlApprox(
        r=r,
        slopes=tuple(a for a, _ in lines),
        intercepts=tuple(c for _, c in lines),
        breakpoints=tuple(bps),
        tangent_points=tuple(tans),
        eps=eps,
    )


def pieces(y1: AffineData, y2: AffineData, r: int, safe: bool = True) -> list[AffineData]:
    """Affine pieces whose maximum bounds ``log(e^y1 + e^y2)``.

    ``safe`` shifts each piece up by ``eps_r`` (an upper bound); otherwise the
    pieces form the lower bound.
    """
    approx = build_pwl(r)
    shift = approx.eps if safe else 0.0
    return [(y1.scaled(1.0 - a) + y2.scaled(a)).shifted(b + shift)
            for a, b in zip(approx.slopes, approx.intercepts)]


def robustify_two_term(y1: AffineData, y2: AffineData, pset: PerturbationSet, r: int, safe: bool = True,
                       rhs: AffineData | None = None, prog: Program | None = None,
                       name: str = "pair") -> list[RobustLinearResult]:
    """Robust ``log(e^y1 + e^y2) <= rhs`` through ``r`` robust linear pieces."""
    return [robustify(p, rhs, pset, prog, name=f"{name}_{i}_w")
            for i, p in enumerate(pieces(y1, y2, r, safe))]


def two_term_bound(y1: AffineData, y2: AffineData, x, pset: PerturbationSet, r: int,
                   safe: bool = True) -> float:
    """Largest robust piece value at ``x``."""
    return max(robust_value(p, x, pset) for p in pieces(y1, y2, r, safe))


def gap_check(upper: float, lower: float) -> float:
    """Relative gap ``(upper - lower) / lower`` between raw objective values."""
    if lower is None or not math.isfinite(lower) or lower <= 0:
        raise ValueError("lower relaxation has no finite positive optimum")
    return (upper - lower) / lower


R_SCHEDULE = (10, 20, 40, 80)
R_CAP = 100
