"""p-variation, (p,q)-bivariation and joint p-variation of sampled functions.

All suprema run over subsequences of the sample grid that keep both
endpoints.  For the piecewise-linear (bilinear) interpolants this is the
exact supremum over all partitions, since the p-th power sums are convex
along each linear piece.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .functions import SampledFunction1D, SampledFunction2D, SizeError

BRUTEFORCE_MAX_POINTS = 20
JOINT_EXACT_MAX_POINTS = 10


@dataclass(frozen=True)
class VariationResult:
    value: float
    optimal_subset: tuple | None
    exact: bool
    # ordinate (or abscissa) pair realising a bivariation supremum
    section: tuple[int, int] | None = None


@dataclass(frozen=True)
class HolderReport:
    holds: bool
    worst_rectangle: tuple[int, int, int, int] | None
    worst_ratio: float


def _check_exponent(p: float) -> None:
    if not p >= 1:
        raise ValueError(f"exponent p={p} < 1 is not supported")


def _values_1d(f) -> np.ndarray:
    if isinstance(f, SampledFunction1D):
        return f.values
    v = np.asarray(f, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a 1D sample of at least 2 points")
    return v


def _dp_pairwise(n: int, p: float, increments) -> tuple[np.ndarray, np.ndarray]:
    """Longest-path DP over endpoint-containing index subsequences.

    ``increments(j)`` returns, for every batch member, the array of costs
    ``w(m, j)`` for ``m < j`` with shape ``(batch, j)``.  Returns the best
    total per batch member and the back-links.
    """
    best = None
    links = None
    for j in range(1, n):
        cand = increments(j)
        if best is None:
            batch = cand.shape[0]
            best = np.zeros((batch, n))
            links = np.zeros((batch, n), dtype=np.int64)
        cand = best[:, :j] + cand
        arg = np.argmax(cand, axis=1)
        links[:, j] = arg
        best[:, j] = cand[np.arange(cand.shape[0]), arg]
    return best[:, -1], links


def _backtrack(links: np.ndarray, n: int) -> tuple[int, ...]:
    path = [n - 1]
    while path[-1] != 0:
        path.append(int(links[path[-1]]))
    return tuple(reversed(path))


def p_variation_many(values, p: float) -> tuple[np.ndarray, np.ndarray]:
    """p-variation of each row of ``values``.

    Returns ``(variations, links)``; ``links`` encodes the maximising
    subsequence of each row (see ``_backtrack``).
    """
    _check_exponent(p)
    v = np.atleast_2d(np.asarray(values, dtype=float))
    n = v.shape[1]
    if n < 2:
        raise ValueError("need at least 2 points")
    if p == 1:
        # refinement never hurts for p = 1
        links = np.tile(np.arange(-1, n - 1), (v.shape[0], 1))
        links[:, 0] = 0
        return np.sum(np.abs(np.diff(v, axis=1)), axis=1), links
    total, links = _dp_pairwise(
        n, p, lambda j: np.abs(v[:, j:j + 1] - v[:, :j]) ** p)
    return total ** (1.0 / p), links


def p_variation(f, p: float) -> VariationResult:
    """Exact p-variation of a sampled function, O(n^2) dynamic programming."""
    v = _values_1d(f)
    vals, links = p_variation_many(v[None, :], p)
    return VariationResult(float(vals[0]), _backtrack(links[0], v.size), True)


def partition_sum(f, p: float, subset) -> float:
    """``(sum |f(x_i) - f(x_{i-1})|^p)^(1/p)`` over the given index subset."""
    v = _values_1d(f)[list(subset)]
    return float(np.sum(np.abs(np.diff(v)) ** p) ** (1.0 / p))


def p_variation_bruteforce(f, p: float) -> VariationResult:
    """Exhaustive maximum over every endpoint-containing subset (n <= 20)."""
    _check_exponent(p)
    v = _values_1d(f)
    n = v.size
    if n > BRUTEFORCE_MAX_POINTS:
        raise SizeError(
            f"brute force limited to {BRUTEFORCE_MAX_POINTS} points, got {n}")
    best, best_subset = -1.0, None
    interior = range(1, n - 1)
    for mask in itertools.product((False, True), repeat=n - 2):
        subset = [0] + [i for i, keep in zip(interior, mask) if keep] + [n - 1]
        s = float(np.sum(np.abs(np.diff(v[subset])) ** p))
        if s > best:
            best, best_subset = s, tuple(subset)
    return VariationResult(best ** (1.0 / p), best_subset, True)


def bivariation_x(F: SampledFunction2D, p: float) -> VariationResult:
    """sup over sample ordinates y1, y2 of ||F(., y1) - F(., y2)||_p."""
    _check_exponent(p)
    V = F.values
    j1, j2 = np.triu_indices(V.shape[1], k=1)
    diffs = (V[:, j1] - V[:, j2]).T
    vals, links = p_variation_many(diffs, p)
    k = int(np.argmax(vals))
    return VariationResult(float(vals[k]), _backtrack(links[k], V.shape[0]), True,
                           section=(int(j1[k]), int(j2[k])))


def bivariation_y(F: SampledFunction2D, q: float) -> VariationResult:
    """sup over sample abscissae x1, x2 of ||F(x1, .) - F(x2, .)||_q."""
    return bivariation_x(F.transpose(), q)


def joint_partition_sum(F: SampledFunction2D, p: float, rows, cols) -> float:
    """``(sum |dd F|^p)^(1/p)`` over the sub-grid ``rows x cols``."""
    sub = F.values[np.ix_(list(rows), list(cols))]
    dd = np.diff(np.diff(sub, axis=0), axis=1)
    return float(np.sum(np.abs(dd) ** p) ** (1.0 / p))


def _best_columns(V: np.ndarray, rows, p: float) -> tuple[float, tuple[int, ...]]:
    """Optimal column subset for a fixed row subset (p-th power sum)."""
    D = np.diff(V[list(rows), :], axis=0)
    n = D.shape[1]
    total, links = _dp_pairwise(
        n, p,
        lambda j: np.sum(np.abs(D[:, j:j + 1] - D[:, :j]) ** p, axis=0)[None, :])
    return float(total[0]), _backtrack(links[0], n)


def joint_variation(F: SampledFunction2D, p: float, mode: str = "exact",
                    restarts: int = 8, seed: int = 0) -> VariationResult:
    """Joint p-variation V_p(F) over grid sub-partitions.

    ``mode="exact"`` enumerates row subsets and optimises the columns of each
    by dynamic programming, which is exact; it is limited to grids of at
    most 10 x 10 points.  ``mode="heuristic"`` runs alternating row/column
    ascent from the full grid and from ``restarts`` random row subsets and
    returns a lower bound flagged ``exact=False``.
    """
    _check_exponent(p)
    V = F.values
    nx, ny = V.shape
    if mode == "exact":
        if nx > JOINT_EXACT_MAX_POINTS or ny > JOINT_EXACT_MAX_POINTS:
            raise SizeError(
                f"exact joint variation limited to {JOINT_EXACT_MAX_POINTS}x"
                f"{JOINT_EXACT_MAX_POINTS} grids, got {nx}x{ny}")
        best, arg = -1.0, None
        for mask in itertools.product((False, True), repeat=nx - 2):
            rows = (0,) + tuple(i + 1 for i, keep in enumerate(mask) if keep) + (nx - 1,)
            s, cols = _best_columns(V, rows, p)
            if s > best:
                best, arg = s, (rows, cols)
        return VariationResult(best ** (1.0 / p), arg, True)
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")

    rng = np.random.default_rng(seed)
    starts = [tuple(range(nx))]
    for _ in range(restarts):
        keep = rng.random(nx - 2) < 0.5
        starts.append((0,) + tuple(int(i) + 1 for i in np.flatnonzero(keep)) + (nx - 1,))
    best, arg = -1.0, None
    VT = V.T
    for rows in starts:
        current, current_arg = -1.0, None
        while True:
            _, cols = _best_columns(V, rows, p)
            s, new_rows = _best_columns(VT, cols, p)
            if s <= current * (1 + 1e-14):
                break
            current, current_arg, rows = s, (new_rows, cols), new_rows
        if current > best:
            best, arg = current, current_arg
    return VariationResult(best ** (1.0 / p), arg, False)


def check_holder_control(G: SampledFunction2D, C: float, p_tilde: float,
                         q_tilde: float) -> HolderReport:
    """Check |dd G| <= C |dx|^(1/p_tilde) |dy|^(1/q_tilde) on every sample rectangle."""
    if not (p_tilde > 1 and q_tilde > 1):
        raise ValueError("p_tilde and q_tilde must exceed 1")
    if not C > 0:
        raise ValueError("C must be positive")
    V = G.values
    x = G.grid_x.points
    y = G.grid_y.points
    nx, ny = V.shape
    ydist = np.abs(y[None, :] - y[:, None]) ** (1.0 / q_tilde)
    upper = np.triu(np.ones((ny, ny), dtype=bool), k=1)
    worst, where = 0.0, None
    for i1 in range(nx - 1):
        R = V[i1 + 1:, :] - V[i1, :]
        dd = np.abs(R[:, None, :] - R[:, :, None])
        den = C * (x[i1 + 1:] - x[i1])[:, None, None] ** (1.0 / p_tilde) * ydist
        ratio = np.zeros_like(dd)
        np.divide(dd, den, out=ratio, where=upper & (den > 0))
        k = int(np.argmax(ratio))
        r = float(ratio.flat[k])
        if r > worst:
            di, j1, j2 = np.unravel_index(k, ratio.shape)
            worst, where = r, (i1, i1 + 1 + int(di), int(j1), int(j2))
    return HolderReport(worst <= 1.0 + 1e-12, where, worst)
