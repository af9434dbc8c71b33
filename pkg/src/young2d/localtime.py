"""Brownian local time through upcrossings of embedded random walks.

Two-parameter fields here are indexed ``(t, x)``: rows are times, columns
are spatial levels, matching integrals ``int_0^t int U(s, x) dg(s, x)``.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .functions import HypothesisError, HypothesisWarning, SampledFunction2D, eval_on_grid
from .integral import young_2d
from .variation import check_holder_control, p_variation_many

OVERSAMPLING_EXPONENT = 6


class UndersamplingError(ValueError):
    pass


@dataclass(frozen=True)
class BrownianPath:
    times: np.ndarray
    values: np.ndarray
    seed: int | None = None
    stopped_at: float | None = None

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("times and values must be 1D arrays of equal length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if t[0] != 0.0 or v[0] != 0.0:
            raise ValueError("paths start at t=0 from 0")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def n_steps(self) -> int:
        return self.times.size - 1


def simulate_bm(T: float, n_steps: int, seed: int) -> BrownianPath:
    """Gaussian random walk with variance ``T / n_steps`` per step, keyed by ``seed``."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    rng = np.random.default_rng(seed)
    dt = T / n_steps
    inc = rng.standard_normal(n_steps) * math.sqrt(dt)
    values = np.concatenate([[0.0], np.cumsum(inc)])
    times = T * (np.arange(n_steps + 1) / n_steps)
    times[-1] = T
    return BrownianPath(times, values, seed)


def stop_at_exit(path: BrownianPath, m: int) -> BrownianPath:
    """Freeze the path at the first sample where ``|B| > 2^m``."""
    out = np.flatnonzero(np.abs(path.values) > 2.0 ** m)
    if out.size == 0:
        return path
    i = int(out[0])
    v = path.values.copy()
    v[i:] = v[i]
    return BrownianPath(path.times, v, path.seed, float(path.times[i]))


@numba.njit(cache=True)
def _scan(times, values, h, uniforms, use_bridge):
    n = values.shape[0]
    cap = 1024
    t_out = np.empty(cap)
    l_out = np.empty(cap, dtype=np.int64)
    t_out[0] = 0.0
    l_out[0] = 0
    c = 1
    L = 0
    for i in range(1, n):
        a = values[i - 1]
        e = values[i]
        t0 = times[i - 1]
        dt = times[i] - t0
        last = t_out[c - 1]
        # make sure room for the crossings of this step plus the bridge event
        need = c + 2 + int(abs(e - a) / h) + 1
        if need > cap:
            while cap < need:
                cap *= 2
            t_new = np.empty(cap)
            l_new = np.empty(cap, dtype=np.int64)
            t_new[:c] = t_out[:c]
            l_new[:c] = l_out[:c]
            t_out = t_new
            l_out = l_new
        if use_bridge and abs(a - L * h) < h and abs(e - L * h) < h:
            # the bridge between two in-band samples may still touch a level
            up = (L + 1) * h
            dn = (L - 1) * h
            pu = math.exp(-2.0 * (up - a) * (up - e) / dt)
            pd = math.exp(-2.0 * (a - dn) * (e - dn) / dt)
            u = uniforms[i - 1]
            step = 0
            if u < pu:
                step = 1
            elif u < pu + pd:
                step = -1
            if step != 0:
                L += step
                last = t0 + 0.5 * dt
                t_out[c] = last
                l_out[c] = L
                c += 1
        while True:
            d = e - L * h
            if d >= h:
                thr = (L + 1) * h
                step = 1
            elif d <= -h:
                thr = (L - 1) * h
                step = -1
            else:
                break
            t = t0 + (thr - a) / (e - a) * dt
            if t <= last:
                t = last + 0.5 * (times[i] - last)
            L += step
            t_out[c] = t
            l_out[c] = L
            c += 1
            last = t
    return t_out[:c].copy(), l_out[:c].copy()


@dataclass(frozen=True)
class EmbeddedWalk:
    k: int
    crossing_times: np.ndarray   # T_0 = 0 < T_1 < ...
    level_index: np.ndarray      # A(T_n) / 2^-k

    @property
    def h(self) -> float:
        return 2.0 ** -self.k

    @property
    def levels(self) -> np.ndarray:
        return self.level_index * self.h

    def N(self, t):
        """Number of crossings ``T_n <= t`` with ``n >= 1``."""
        return np.searchsorted(self.crossing_times, t, side="right") - 1

    def value_at(self, t):
        return self.levels[self.N(t)]


def check_oversampling(n_steps: int, k: int) -> None:
    need = 2 ** (2 * k + OVERSAMPLING_EXPONENT)
    if n_steps < need:
        raise UndersamplingError(
            f"k={k} needs n_steps >= 2^(2k+{OVERSAMPLING_EXPONENT}) = {need} "
            f"(about 64 samples between crossings), got {n_steps}")


def embed_walk(path: BrownianPath, k: int, bridge: bool | None = None) -> EmbeddedWalk:
    """Crossings of the ``2^-k`` grid relative to the last crossing level.

    A crossing is detected at the first sample beyond the next level; its
    time is found by linear interpolation and its level is snapped to the
    previous level ``+- 2^-k``.  With ``bridge`` on (the default for seeded
    paths) a step whose two samples both stay inside the band also records
    a crossing with the probability that a Brownian bridge between them
    leaves the band; without it the walk misses those excursions and runs
    about 13% short of crossings at 64 samples per crossing.
    """
    check_oversampling(path.n_steps, k)
    h = 2.0 ** -k
    if bridge is None:
        bridge = path.seed is not None
    if bridge:
        seed = 0 if path.seed is None else path.seed
        unif = np.random.default_rng([seed, k]).random(path.n_steps)
    else:
        unif = np.empty(0)
    t, lv = _scan(path.times, path.values, h, unif, bool(bridge))
    return EmbeddedWalk(k, t, lv)


def level_of(x, h: float) -> np.ndarray:
    """``j`` with ``x`` in ``((j - 1) h, j h]``."""
    return np.ceil(np.asarray(x, dtype=float) / h - 1e-9).astype(np.int64)


@dataclass
class UpcrossingField:
    """``U(t, x) = 2 h u(j h, t)`` with ``u`` the number of completed upcrossings
    from ``(j - 1) h`` to ``j h`` by time ``t``; zero below ``-2^m``."""

    walk: EmbeddedWalk
    m: int
    t_grid: np.ndarray
    up_times: np.ndarray = field(repr=False)
    up_levels: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.walk.k

    @property
    def h(self) -> float:
        return self.walk.h

    @property
    def x_levels(self) -> np.ndarray:
        n = 2 ** (self.m + self.k)
        return np.arange(-n, n + 1) * self.h

    @property
    def domain(self):
        return (0.0, float(self.t_grid[-1])), (-2.0 ** self.m - 1.0, 2.0 ** self.m)

    def counts(self, ts, levels) -> np.ndarray:
        """Upcrossing counts ``u[t, j]`` for level indices ``levels``."""
        ts = np.asarray(ts, dtype=float)
        levels = np.asarray(levels, dtype=np.int64)
        order = np.argsort(ts, kind="stable")
        ts_sorted = ts[order]
        if self.up_levels.size == 0:
            return np.zeros((ts.size, levels.size), dtype=np.int64)
        lo = int(self.up_levels.min())
        width = int(self.up_levels.max()) - lo + 1
        bucket = np.searchsorted(ts_sorted, self.up_times, side="left")
        keep = bucket < ts.size
        hist = np.bincount(bucket[keep] * width + (self.up_levels[keep] - lo),
                           minlength=ts.size * width).reshape(ts.size, width)
        cum = np.cumsum(hist, axis=0)
        col = levels - lo
        inside = (col >= 0) & (col < width)
        out = np.zeros((ts.size, levels.size), dtype=np.int64)
        out[:, inside] = cum[:, col[inside]]
        res = np.empty_like(out)
        res[order] = out
        return res

    def on_grid(self, ts, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        U = 2.0 * self.h * self.counts(ts, level_of(xs, self.h))
        U[:, xs < -2.0 ** self.m] = 0.0
        return U

    def __call__(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        flat = np.array([self.on_grid([ti], [xi])[0, 0] for ti, xi in zip(t.ravel(), x.ravel())])
        return flat.reshape(t.shape)

    def field(self) -> SampledFunction2D:
        """Values on ``t_grid x x_levels``."""
        return SampledFunction2D(self.t_grid, self.x_levels, self.on_grid(self.t_grid, self.x_levels))


def upcrossing_field(walk: EmbeddedWalk, m: int, t_grid, k: int | None = None) -> UpcrossingField:
    if k is not None and k != walk.k:
        raise ValueError(f"walk is at level k={walk.k}, not {k}")
    lv = walk.level_index
    up = np.flatnonzero(np.diff(lv) == 1) + 1
    return UpcrossingField(walk, m, np.asarray(t_grid, dtype=float),
                           walk.crossing_times[up], lv[up])


@dataclass(frozen=True)
class LocalTimeField:
    t_grid: np.ndarray
    x_grid: np.ndarray
    values: np.ndarray   # [t, x]
    epsilon: float

    def to_sampled(self) -> SampledFunction2D:
        return SampledFunction2D(self.t_grid, self.x_grid, self.values)


@dataclass
class OccupationDensity:
    """``(1 / 2 eps) sum_{t_{i+1} <= t} dt 1{|B(t_i) - x| < eps}``, zero for ``x < x_floor``."""

    path: BrownianPath
    epsilon: float
    x_floor: float = -np.inf

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        rms = float(np.sqrt(np.mean(np.diff(self.path.values) ** 2)))
        if self.epsilon < 2.0 * rms:
            warnings.warn(f"epsilon={self.epsilon:.3g} is below twice the RMS increment "
                          f"{rms:.3g}; the estimator is noisy", HypothesisWarning, stacklevel=3)

    def on_grid(self, ts, xs) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        xs = np.asarray(xs, dtype=float)
        t_ord = np.argsort(ts, kind="stable")
        x_ord = np.argsort(xs, kind="stable")
        ts_s, xs_s = ts[t_ord], xs[x_ord]
        b = self.path.values[:-1]
        dt = np.diff(self.path.times)
        eps = self.epsilon
        # x in (B - eps, B + eps) is a contiguous run of the sorted x grid
        lo = np.searchsorted(xs_s, b - eps, side="right")
        hi = np.searchsorted(xs_s, b + eps, side="left")
        row = np.searchsorted(ts_s, self.path.times[1:], side="left")
        keep = (row < ts.size) & (hi > lo)
        nx1 = xs.size + 1
        w = dt[keep]
        acc = np.bincount(row[keep] * nx1 + lo[keep], weights=w, minlength=ts.size * nx1).astype(float)
        acc -= np.bincount(row[keep] * nx1 + hi[keep], weights=w, minlength=ts.size * nx1)
        dens = np.cumsum(np.cumsum(acc.reshape(ts.size, nx1), axis=0), axis=1)[:, :-1]
        dens /= 2.0 * eps
        dens[:, xs_s < self.x_floor] = 0.0
        out = np.empty_like(dens)
        out[np.ix_(t_ord, x_ord)] = dens
        return out


def occupation_local_time(path: BrownianPath, x_grid, t_grid, epsilon: float) -> LocalTimeField:
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    vals = OccupationDensity(path, epsilon).on_grid(t_grid, x_grid)
    return LocalTimeField(t_grid, x_grid, vals, float(epsilon))


@dataclass(frozen=True)
class PowerTestFunction:
    """g(s, x) = c s^a (x + 2^m + 1)^b on ``[0, T] x [-2^m - 1, 2^m]``."""

    m: int = 2
    T: float = 1.0
    a: float = 1.0
    b: float = 2.0
    c: float = 0.1

    @property
    def domain(self):
        return (0.0, self.T), (-2.0 ** self.m - 1.0, 2.0 ** self.m)

    def phi(self, s):
        return np.asarray(s, dtype=float) ** self.a

    def psi(self, x):
        return (np.asarray(x, dtype=float) + 2.0 ** self.m + 1.0) ** self.b

    def __call__(self, s, x):
        return self.c * self.phi(s) * self.psi(x)

    def holder_constant(self, q1: float, q2: float) -> float:
        """Rectangle bound M with |dd g| <= M |ds|^(1/q1) |dx|^(1/q2) (mean value theorem)."""
        width = 2.0 ** (self.m + 1) + 1.0
        cs = self.a * self.T ** (self.a - 1.0) * self.T ** (1.0 - 1.0 / q1)
        cx = self.b * width ** (self.b - 1.0) * width ** (1.0 - 1.0 / q2)
        return self.c * cs * cx


def check_h21(g: Callable, q1: float, q2: float, alpha: float, delta: float,
              M: float, domain, n_grid: int = 33) -> dict:
    """Exponent condition and sampled Hölder control of the integrator ``g``."""
    e1 = alpha + 1.0 / q1
    e2 = (1.0 - alpha) / (2.0 + delta) + 1.0 / q2
    if not (q1 > 1 and q2 > 1 and 0 < alpha < 1 and delta > 0):
        raise HypothesisError("need q1, q2 > 1, alpha in (0, 1), delta > 0")
    if not min(e1, e2) > 1:
        raise HypothesisError(
            f"min(alpha + 1/q1, (1 - alpha)/(2 + delta) + 1/q2) = {min(e1, e2):.6g} <= 1")
    (t0, t1), (x0, x1) = domain
    G = SampledFunction2D.from_callable(g, np.linspace(t0, t1, n_grid), np.linspace(x0, x1, n_grid))
    rep = check_holder_control(G, M, q1, q2)
    if not rep.holds:
        raise HypothesisError(f"g violates its Hölder control (ratio {rep.worst_ratio:.4g})")
    return {"exponents": (e1, e2), "holder_ratio": rep.worst_ratio}


class _Difference:
    def __init__(self, A, B, domain):
        self.A, self.B, self.domain = A, B, domain

    def on_grid(self, xs, ys):
        return eval_on_grid(self.A, xs, ys) - eval_on_grid(self.B, xs, ys)


def exact_integrals(U: UpcrossingField, L: OccupationDensity, g: PowerTestFunction,
                    t: float) -> tuple[float, float]:
    """Closed forms of ``int_0^t int U dg`` and ``int_0^t int L dg`` for product ``g``.

    Both fields are sums of indicator blocks ``1{s >= s0} 1{x in (x0, x1]}``,
    and such a block integrates against ``c phi(s) psi(x)`` to
    ``c (phi(t) - phi(s0)) (psi(x1) - psi(x0))``.
    """
    floor = -2.0 ** g.m
    h = U.h
    keep = U.up_times <= t
    x1 = U.up_levels[keep] * h
    x0 = np.maximum(x1 - h, floor)
    on = x1 > floor
    iu = 2.0 * h * math.fsum(
        ((g.phi(t) - g.phi(U.up_times[keep])) * (g.psi(x1) - g.psi(x0)))[on])
    times = L.path.times
    b = L.path.values[:-1]
    eps = L.epsilon
    done = times[1:] <= t
    lo = np.maximum(b[done] - eps, floor)
    hi = np.maximum(b[done] + eps, floor)
    w = np.diff(times)[done] / (2.0 * eps)
    il = math.fsum(w * (g.phi(t) - g.phi(times[1:][done])) * (g.psi(hi) - g.psi(lo)))
    return g.c * iu, g.c * il


@dataclass(frozen=True)
class PathErrors:
    k: int
    sup_error: float
    integral_error: float
    integral_converged: bool
    stopped: bool


def path_errors(path: BrownianPath, k: int, m: int, g: Callable, t_grid, tol: float = 1e-4,
                max_depth: int | None = None, bridge: bool | None = None,
                method: str = "young") -> PathErrors:
    """Sup and integral discrepancies between ``U^k`` and the occupation estimate at eps = 2^-k.

    ``method="young"`` integrates with ``young_2d`` on the extended domain
    (depth ``k + m + 2`` by default); ``method="exact"`` uses the closed
    form available for product test functions.
    """
    walk = embed_walk(path, k, bridge)
    U = upcrossing_field(walk, m, t_grid)
    L = OccupationDensity(path, 2.0 ** -k, x_floor=-2.0 ** m)
    xs = U.x_levels
    sup_err = float(np.max(np.abs(U.on_grid(t_grid, xs) - L.on_grid(t_grid, xs))))
    t_end = float(t_grid[-1])
    if method == "exact":
        iu, il = exact_integrals(U, L, g, t_end)
        return PathErrors(k, sup_err, abs(iu - il), True, path.stopped_at is not None)
    if method != "young":
        raise ValueError(f"unknown method {method!r}")
    dom = ((0.0, t_end), (-2.0 ** m - 1.0, 2.0 ** m))
    depth = k + m + 2 if max_depth is None else max_depth
    res = young_2d(_Difference(U, L, dom), g, tol=tol, max_depth=depth, check_axes=False,
                   min_depth=k + m)
    return PathErrors(k, sup_err, abs(res.value), res.converged, path.stopped_at is not None)


def _experiment_path(args):
    seed, ks, m, T, n_steps, g, t_grid, tol, method = args
    path = stop_at_exit(simulate_bm(T, n_steps, seed), m)
    return [path_errors(path, k, m, g, t_grid, tol, method=method) for k in ks]


CONVERGENCE_COLUMNS = ("k", "n_paths", "mean_sup_error", "se_sup_error",
                       "mean_integral_L1_error", "se_integral_L1_error", "stopped_fraction")


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(np.mean(x)), se


def convergence_experiment(ks, n_paths: int, seed0: int, m: int = 2, T: float = 1.0,
                           n_steps: int | None = None, g: Callable | None = None,
                           q1: float = 1.1, q2: float = 1.1, alpha: float = 0.5,
                           delta: float = 0.5, n_t: int = 65, tol: float = 1e-4,
                           method: str = "young", threads: int = 1) -> list[dict]:
    """Monte Carlo sup and integral errors of ``U^k`` against the occupation estimate.

    Replicate ``i`` uses the path seeded ``seed0 + i``; all levels ``k`` share
    it.  Paths leaving ``[-2^m, 2^m]`` are frozen and counted.  ``method``
    selects the integral evaluation of ``path_errors``.
    """
    ks = [int(k) for k in ks]
    if n_steps is None:
        n_steps = 2 ** (2 * max(ks) + OVERSAMPLING_EXPONENT)
    for k in ks:
        check_oversampling(n_steps, k)
    g = PowerTestFunction(m=m, T=T) if g is None else g
    M = g.holder_constant(q1, q2) if hasattr(g, "holder_constant") else None
    if M is not None:
        check_h21(g, q1, q2, alpha, delta, M * (1 + 1e-9), ((0.0, T), (-2.0 ** m - 1.0, 2.0 ** m)))
    t_grid = np.linspace(0.0, T, n_t)
    jobs = [(seed0 + i, ks, m, T, n_steps, g, t_grid, tol, method) for i in range(n_paths)]
    if threads <= 1:
        results = [_experiment_path(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_experiment_path, jobs))
    rows = []
    for col, k in enumerate(ks):
        per = [r[col] for r in results]
        ms, ss = _mean_se([e.sup_error for e in per])
        mi, si = _mean_se([e.integral_error for e in per])
        rows.append({"k": k, "n_paths": n_paths, "mean_sup_error": ms, "se_sup_error": ss,
                     "mean_integral_L1_error": mi, "se_integral_L1_error": si,
                     "stopped_fraction": float(np.mean([e.stopped for e in per]))})
    return rows


def field_norms(U: UpcrossingField, delta: float = 0.5, T: float | None = None) -> tuple[float, float]:
    """``sup_x ||U(., x)||_1`` and ``sup_t ||U(t, .)||_{2+delta}^{2+delta}`` over ``I_m``."""
    xs = U.x_levels
    ts = U.t_grid
    vals = U.on_grid(ts, xs)
    # U(., x) is nondecreasing in t, so its 1-variation is the total increase
    n1 = float(np.max(vals[-1] - vals[0]))
    pv, _ = p_variation_many(vals, 2.0 + delta)
    n2 = float(np.max(pv ** (2.0 + delta)))
    return n1, n2


MOMENT_COLUMNS = ("k", "n_paths", "mean_norm_1", "se_norm_1", "ci_low_norm_1", "ci_high_norm_1",
                  "mean_norm_2", "se_norm_2", "ci_low_norm_2", "ci_high_norm_2")


def _moment_path(args):
    seed, ks, m, T, n_steps, t_grid, delta = args
    path = stop_at_exit(simulate_bm(T, n_steps, seed), m)
    return [field_norms(upcrossing_field(embed_walk(path, k), m, t_grid), delta) for k in ks]


def bivariation_moments(ks, n_paths: int, seed0: int, m: int = 2, delta: float = 0.5,
                        T: float = 1.0, n_steps: int | None = None, n_t: int = 17,
                        threads: int = 1) -> list[dict]:
    """Monte Carlo means of the two bivariation-type norms of ``U^k`` with 95% intervals."""
    ks = [int(k) for k in ks]
    if n_steps is None:
        n_steps = 2 ** (2 * max(ks) + OVERSAMPLING_EXPONENT)
    for k in ks:
        check_oversampling(n_steps, k)
    t_grid = np.linspace(0.0, T, n_t)
    jobs = [(seed0 + i, ks, m, T, n_steps, t_grid, delta) for i in range(n_paths)]
    if threads <= 1:
        results = [_moment_path(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_moment_path, jobs))
    rows = []
    for col, k in enumerate(ks):
        row = {"k": k, "n_paths": n_paths}
        for idx, name in ((0, "norm_1"), (1, "norm_2")):
            mean, se = _mean_se([r[col][idx] for r in results])
            row.update({f"mean_{name}": mean, f"se_{name}": se,
                        f"ci_low_{name}": mean - 1.96 * se, f"ci_high_{name}": mean + 1.96 * se})
        rows.append(row)
    return rows


def summation_by_parts_terms(g: SampledFunction2D, L: SampledFunction2D) -> tuple[float, float]:
    """Both sides of the discrete summation-by-parts identity.

    ``g`` and ``L`` are sampled on the same ``(t, x)`` grid with
    ``L(0, .) = 0``.  With ``i`` the space and ``j`` the time index,
    ``sum_{i<l, j<P} g[i, j] dd L[i+1, j+1]`` equals the interior sum
    ``sum L dd g`` minus the boundary terms at ``t = t_P`` and at both
    spatial edges; the edge terms vanish when ``L`` does.
    """
    if g.values.shape != L.values.shape:
        raise ValueError(f"shape mismatch {g.values.shape} vs {L.values.shape}")
    if not (np.array_equal(g.grid_x.points, L.grid_x.points)
            and np.array_equal(g.grid_y.points, L.grid_y.points)):
        raise ValueError("g and L must share their grid")
    Lv = L.values.T      # [space, time]
    gv = g.values.T
    if np.any(Lv[:, 0] != 0.0):
        raise ValueError("L must vanish at the first time")
    l, P = Lv.shape[0] - 1, Lv.shape[1] - 1
    ddL = Lv[1:, 1:] - Lv[:-1, 1:] - Lv[1:, :-1] + Lv[:-1, :-1]
    ddg = gv[1:, 1:] - gv[:-1, 1:] - gv[1:, :-1] + gv[:-1, :-1]
    lhs = math.fsum((gv[:-1, :-1] * ddL).ravel())
    terms = [
        *(Lv[1:, 1:] * ddg).ravel(),
        *(-Lv[1:, P] * (gv[1:, P] - gv[:-1, P])),
        *(-Lv[l, 1:] * (gv[l, 1:] - gv[l, :-1])),
        Lv[l, P] * gv[l, P],
        *(Lv[0, 1:] * (gv[0, 1:] - gv[0, :-1])),
        -Lv[0, P] * gv[0, P],
    ]
    return lhs, math.fsum(terms)


def summation_by_parts_check(g: SampledFunction2D, L: SampledFunction2D) -> float:
    """Absolute residual of the summation-by-parts identity."""
    lhs, rhs = summation_by_parts_terms(g, L)
    return abs(lhs - rhs)
