"""Riemann-Stieltjes sums and Young integrals in one and two parameters.

Young integrals are approximated along uniform dyadic chains with midpoint
tags: level ``n`` splits ``[a, b]`` into ``2^n`` equal cells.  The 2D sums
``S_{n,n'}`` of the telescoping identity use right-endpoint evaluation on
arbitrary refinement chains instead.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .functions import HypothesisWarning, eval_on_grid
from .partitions import RefinementChain, StepFunction1D, StepFunction2D, dyadic_level
from .variation import p_variation

# cap on cells evaluated at once in the 2D sums
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True)
class IntegralResult:
    value: float
    depth_reached: tuple[int, ...]
    last_delta: float
    converged: bool


def _domain_1d(f, interval):
    if interval is not None:
        return tuple(map(float, interval))
    dom = getattr(f, "domain", None)
    if dom is None:
        raise ValueError("interval is required for plain callables")
    return dom


def _domain_2d(F, domain):
    if domain is not None:
        (a, b), (c, d) = domain
        return (float(a), float(b)), (float(c), float(d))
    dom = getattr(F, "domain", None)
    if dom is None:
        raise ValueError("domain is required for plain callables")
    return dom


def rs_sum_1d(step: StepFunction1D, g: Callable) -> float:
    """sum_i f(xi_i) (g(x_i) - g(x_{i-1}))."""
    gv = np.asarray(g(step.partition.points), dtype=float)
    return float(np.sum(step.interior_values * np.diff(gv)))


def _midpoint_sum_1d(f, g, a, b, n):
    t = dyadic_level(a, b, n)
    mids = 0.5 * (t[:-1] + t[1:])
    fm = np.broadcast_to(np.asarray(f(mids), dtype=float), mids.shape)
    gv = np.broadcast_to(np.asarray(g(t), dtype=float), t.shape)
    return float(np.sum(fm * np.diff(gv)))


def young_1d(f: Callable, g: Callable, tol: float = 1e-6, max_depth: int = 14,
             interval=None) -> IntegralResult:
    """int_a^b f dg as the limit of midpoint-tagged sums on dyadic levels.

    Stops at the first level whose sum differs from the previous one by less
    than ``tol``.  Non-convergence by ``max_depth`` is reported through
    ``converged=False``.
    """
    a, b = _domain_1d(f, interval)
    prev = _midpoint_sum_1d(f, g, a, b, 0)
    delta = np.inf
    for n in range(1, max_depth + 1):
        cur = _midpoint_sum_1d(f, g, a, b, n)
        delta = abs(cur - prev)
        prev = cur
        if delta < tol:
            return IntegralResult(cur, (n,), delta, True)
    return IntegralResult(prev, (max_depth,), delta, False)


def young_bound_1d(f, g, p: float, q: float) -> float:
    """(1 + zeta(1/p + 1/q)) [|f(a)| + ||f||_p] ||g||_q."""
    from .bounds import zeta

    theta = 1.0 / p + 1.0 / q
    if not theta > 1:
        raise ValueError(f"1/p + 1/q = {theta} must exceed 1")
    fa = float(f.values[0])
    return (1.0 + zeta(theta)) * (abs(fa) + p_variation(f, p).value) * p_variation(g, q).value


def double_difference(V: np.ndarray) -> np.ndarray:
    """Rectangle increments ``V[i,j] - V[i-1,j] - V[i,j-1] + V[i-1,j-1]``."""
    return V[1:, 1:] - V[:-1, 1:] - V[1:, :-1] + V[:-1, :-1]


def step_integral_2d(stepF: StepFunction2D, G: Callable) -> float:
    """sum_ij F(xi_i, eta_j) dd G(x_i, y_j) over the step function's partitions."""
    Gv = eval_on_grid(G, stepF.partition_x.points, stepF.partition_y.points)
    return float(np.sum(stepF.cell_values * double_difference(Gv)))


def stieltjes_sum_2d(F, G, xn, yn, xt, yt) -> float:
    """sum_ij F(xt_i, yt_j) dd G on nodes ``xn x yn``; rows processed in blocks."""
    xn, yn = np.asarray(xn, dtype=float), np.asarray(yn, dtype=float)
    xt, yt = np.asarray(xt, dtype=float), np.asarray(yt, dtype=float)
    rows = max(1, _BLOCK_CELLS // max(1, yt.size))
    total = 0.0
    for r0 in range(0, xt.size, rows):
        r1 = min(xt.size, r0 + rows)
        Gv = eval_on_grid(G, xn[r0:r1 + 1], yn)
        Fv = eval_on_grid(F, xt[r0:r1], yt)
        total += float(np.sum(Fv * double_difference(Gv)))
    return total


def chain_sum(F, G, t, s) -> float:
    """S = sum_{i,j >= 1} F(t_i, s_j) dd G(t_i, s_j) with right-endpoint evaluation."""
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    return stieltjes_sum_2d(F, G, t, s, t[1:], s[1:])


def chain_sums(F, G, chain_x: RefinementChain, chain_y: RefinementChain) -> np.ndarray:
    """Array ``S[n, n']`` of right-endpoint sums over all chain levels."""
    S = np.empty((len(chain_x.levels), len(chain_y.levels)))
    for n, t in enumerate(chain_x.levels):
        for m, s in enumerate(chain_y.levels):
            S[n, m] = chain_sum(F, G, t, s)
    return S


def telescope_delta(F, G, chain_x: RefinementChain, chain_y: RefinementChain,
                    n: int, n2: int) -> float:
    """Closed form of ``S_{n,n'} - S_{n-1,n'} - S_{n,n'-1} + S_{n-1,n'-1}``.

    Equals ``sum_{i,j} dd F(t_{2i}, s_{2j}) * dd G(t_{2i-1}, s_{2j-1})`` over
    ``i <= 2^{n-1}, j <= 2^{n'-1}``, both double differences taken on the
    level-``(n, n')`` grid.
    """
    if not (1 <= n <= chain_x.depth and 1 <= n2 <= chain_y.depth):
        raise ValueError(
            f"levels ({n}, {n2}) outside 1..{chain_x.depth} x 1..{chain_y.depth}")
    t, s = chain_x.levels[n], chain_y.levels[n2]
    ddF = double_difference(eval_on_grid(F, t, s))
    ddG = double_difference(eval_on_grid(G, t, s))
    # ddX[i-1, j-1] is the increment of the cell ending at (t_i, s_j)
    return float(np.sum(ddF[1::2, 1::2] * ddG[0::2, 0::2]))


def corner_term(F, G, domain) -> float:
    """F(b, d) (G(b, d) - G(b, c) - G(a, d) + G(a, c))."""
    (a, b), (c, d) = domain
    Gv = eval_on_grid(G, [a, b], [c, d])
    Fbd = float(eval_on_grid(F, [b], [d])[0, 0])
    return Fbd * float(double_difference(Gv)[0, 0])


def _check_vanishing(F, domain, n_probe: int = 65) -> None:
    (a, b), (c, d) = domain
    xs = getattr(getattr(F, "grid_x", None), "points", None)
    ys = getattr(getattr(F, "grid_y", None), "points", None)
    if xs is None:
        xs = np.linspace(a, b, n_probe)
    if ys is None:
        ys = np.linspace(c, d, n_probe)
    along_x = eval_on_grid(F, xs, [c])
    along_y = eval_on_grid(F, [a], ys)
    worst = max(np.max(np.abs(along_x)), np.max(np.abs(along_y)))
    if worst > 1e-12:
        warnings.warn(
            f"integrand does not vanish on x=a and y=c (max |F| = {worst:.3g})",
            HypothesisWarning, stacklevel=3)


def young_2d(F, G, tol: float = 1e-6, max_depth: int = 14, domain=None,
             check_axes: bool = True, min_depth: int = 0) -> IntegralResult:
    """2D Young integral as the limit of midpoint-tagged sums on joint dyadic levels.

    At level ``n`` both axes carry ``2^n`` equal cells.  The increment
    ``|dd S| + |S_{n,n-1} - S_{n-1,n-1}| + |S_{n-1,n} - S_{n-1,n-1}|``
    bounds ``|S_{n,n} - S_{n-1,n-1}|``; the iteration stops once it stays
    below ``tol`` on two successive levels past ``min_depth``.  Integrands
    supported on a small part of the domain need ``min_depth`` so that
    coarse levels seeing only zeros do not stop the iteration.
    """
    dom = _domain_2d(F, domain)
    (a, b), (c, d) = dom
    if check_axes:
        _check_vanishing(F, dom)

    def S(nx, ny):
        t, s = dyadic_level(a, b, nx), dyadic_level(c, d, ny)
        return stieltjes_sum_2d(F, G, t, s, 0.5 * (t[:-1] + t[1:]), 0.5 * (s[:-1] + s[1:]))

    prev_diag = S(0, 0)
    delta, below = np.inf, 0
    for n in range(1, max_depth + 1):
        diag = S(n, n)
        s10 = S(n, n - 1)
        s01 = S(n - 1, n)
        dd = diag - s10 - s01 + prev_diag
        delta = abs(dd) + abs(s10 - prev_diag) + abs(s01 - prev_diag)
        prev_diag = diag
        below = below + 1 if delta < tol and n > min_depth else 0
        if below >= 2:
            return IntegralResult(diag, (n, n), delta, True)
    return IntegralResult(prev_diag, (max_depth, max_depth), delta, False)
