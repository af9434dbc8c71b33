import math

import numpy as np
import pytest

from young2d.functions import HypothesisError, HypothesisWarning, SampledFunction2D
from young2d.localtime import (BrownianPath, OccupationDensity, PowerTestFunction,
                               UndersamplingError, bivariation_moments, check_h21,
                               convergence_experiment, embed_walk, exact_integrals, field_norms,
                               path_errors, simulate_bm, stop_at_exit, summation_by_parts_check,
                               summation_by_parts_terms, upcrossing_field)
from young2d.variation import p_variation_bruteforce


def piecewise_path(knots_t, knots_v, n):
    t = np.linspace(0, knots_t[-1], n + 1)
    return BrownianPath(t, np.interp(t, knots_t, knots_v))


def rescan(path, k):
    """Plain-loop crossing detector used as an oracle for the compiled scanner."""
    h = 2.0 ** -k
    times, levels = [0.0], [0]
    L = 0
    tv, vv = path.times, path.values
    for i in range(1, tv.size):
        a, e = vv[i - 1], vv[i]
        while True:
            if e >= (L + 1) * h:
                L += 1
            elif e <= (L - 1) * h:
                L -= 1
            else:
                break
            lev = L * h
            s = (lev - a) / (e - a)
            times.append(max(tv[i - 1] + s * (tv[i] - tv[i - 1]), times[-1]))
            levels.append(L)
    return np.array(times), np.array(levels)


def test_simulate_bm_deterministic():
    a, b = simulate_bm(1.0, 64, 5), simulate_bm(1.0, 64, 5)
    assert np.array_equal(a.values, b.values) and a.values[0] == 0.0
    assert not np.array_equal(a.values, simulate_bm(1.0, 64, 6).values)
    assert a.times[-1] == 1.0 and a.n_steps == 64


def test_simulate_bm_variance():
    ends = np.array([simulate_bm(2.0, 8, s).values[-1] for s in range(10 ** 4)])
    assert np.var(ends) == pytest.approx(2.0, rel=0.05)


def test_path_validation():
    with pytest.raises(ValueError):
        BrownianPath([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        BrownianPath([0.0, 0.0], [0.0, 0.0])


def test_stop_at_exit():
    p = piecewise_path([0, 1], [0, 3], 30)
    s = stop_at_exit(p, 1)
    i = np.flatnonzero(p.values > 2)[0]
    assert s.stopped_at == p.times[i]
    assert np.all(s.values[i:] == p.values[i]) and np.array_equal(s.values[:i], p.values[:i])
    assert stop_at_exit(p, 2).stopped_at is None
    for seed in range(20):
        b = simulate_bm(4.0, 512, seed)
        s = stop_at_exit(b, 0)
        assert np.max(np.abs(s.values)) <= 1 + np.max(np.abs(np.diff(b.values)))


def test_ramp_crossings():
    w = embed_walk(piecewise_path([0, 1], [0, 1], 256), 1)
    assert list(w.level_index) == [0, 1, 2]
    assert w.crossing_times[1:] == pytest.approx([0.5, 1.0])
    assert list(w.N([0.0, 0.49, 0.5, 1.0])) == [0, 0, 1, 2]
    assert w.value_at(0.75) == 0.5


def test_sawtooth_crossings():
    w = embed_walk(piecewise_path([0, 1, 2, 3], [0, 0.75, 0, 0.75], 768), 1)
    assert list(w.levels[1:]) == [0.5, 0.0, 0.5]


def test_flat_path_and_undersampling():
    w = embed_walk(BrownianPath(np.linspace(0, 1, 257), np.zeros(257)), 1)
    assert list(w.level_index) == [0]
    with pytest.raises(UndersamplingError, match="n_steps"):
        embed_walk(piecewise_path([0, 1], [0, 1], 255), 1)


def test_scan_matches_rescan():
    path = BrownianPath(*(lambda p: (p.times, p.values))(simulate_bm(1.0, 10 ** 4, 3)))
    for k in (1, 2, 3):
        w = embed_walk(path, k)
        t, lv = rescan(path, k)
        assert np.array_equal(w.level_index, lv)
        assert np.allclose(w.crossing_times, t, atol=1e-12)
        assert np.all(np.abs(np.diff(w.level_index)) == 1)


def test_bridge_adds_crossings_reproducibly():
    path = simulate_bm(1.0, 2 ** 12, 11)
    a, b = embed_walk(path, 2), embed_walk(path, 2)
    assert np.array_equal(a.crossing_times, b.crossing_times)
    plain = embed_walk(path, 2, bridge=False)
    assert a.level_index.size >= plain.level_index.size
    assert np.all(np.diff(a.crossing_times) >= 0)


def test_upcrossing_field_ramp():
    path = piecewise_path([0, 1], [0, 1], 256)
    U = upcrossing_field(embed_walk(path, 1), 1, [0.0, 0.6, 1.0])
    vals = U.on_grid([0.0, 0.6, 1.0], [0.25, 0.5, 0.75, 1.0, 1.5, -0.5, -3.0])
    assert vals.tolist() == [[0, 0, 0, 0, 0, 0, 0],
                             [1, 1, 0, 0, 0, 0, 0],
                             [1, 1, 1, 1, 0, 0, 0]]
    assert U(1.0, 0.3) == 1.0
    F = U.field()
    assert F.values.shape == (3, 9)


def test_upcrossing_field_against_walk():
    path = simulate_bm(1.0, 2 ** 12, 8)
    w = embed_walk(path, 2)
    ts = np.linspace(0, 1, 9)
    U = upcrossing_field(w, 1, ts)
    xs = U.x_levels
    vals = U.on_grid(ts, xs)
    lv, ct = w.level_index, w.crossing_times
    for a, t in enumerate(ts):
        for b, x in enumerate(xs):
            j = round(x / w.h)
            n = sum(1 for i in range(1, lv.size) if lv[i] == j and lv[i - 1] == j - 1 and ct[i] <= t)
            assert vals[a, b] == 2 * w.h * n
    assert np.all(np.diff(vals, axis=0) >= 0)
    # each up step of a level pair is followed by at most one matching down step
    for j in np.unique(lv):
        ups = np.sum((lv[1:] == j) & (lv[:-1] == j - 1))
        downs = np.sum((lv[1:] == j - 1) & (lv[:-1] == j))
        assert abs(int(ups) - int(downs)) <= 1


def test_occupation_ramp():
    path = piecewise_path([0, 1], [0, 1], 256)
    L = OccupationDensity(path, 1 / 8)
    vals = L.on_grid([0.5, 1.0], [0.5, 3.0, -1.0])
    assert vals[1, 0] == pytest.approx(63 / 64)
    assert vals[1, 1] == 0.0 and vals[1, 2] == 0.0
    assert vals[0, 0] < vals[1, 0]
    assert OccupationDensity(path, 1 / 8, x_floor=0.6).on_grid([1.0], [0.5])[0, 0] == 0.0


def test_occupation_identity():
    path = simulate_bm(1.0, 2 ** 14, 4)
    xs = np.linspace(-6, 6, 6001)
    L = OccupationDensity(path, 0.05).on_grid([1.0], xs)[0]
    assert np.sum(L) * (xs[1] - xs[0]) == pytest.approx(1.0, rel=0.02)


def test_occupation_warns_for_tiny_epsilon():
    with pytest.warns(HypothesisWarning):
        OccupationDensity(simulate_bm(1.0, 16, 0), 1e-3)
    with pytest.raises(ValueError):
        OccupationDensity(simulate_bm(1.0, 16, 0), 0.0)


def test_power_test_function_h21():
    g = PowerTestFunction(m=2)
    M = g.holder_constant(1.1, 1.1)
    info = check_h21(g, 1.1, 1.1, 0.5, 0.5, M * (1 + 1e-9), g.domain)
    assert min(info["exponents"]) > 1 and info["holder_ratio"] <= 1
    with pytest.raises(HypothesisError, match="min"):
        check_h21(g, 3.0, 3.0, 0.5, 0.5, M, g.domain)
    with pytest.raises(HypothesisError, match="Hölder"):
        check_h21(g, 1.1, 1.1, 0.5, 0.5, M / 10, g.domain)


def test_exact_and_young_integrals_agree():
    path = stop_at_exit(simulate_bm(1.0, 2 ** 12, 21), 1)
    g = PowerTestFunction(m=1)
    ts = np.linspace(0, 1, 33)
    young = path_errors(path, 3, 1, g, ts, tol=1e-6, max_depth=9)
    exact = path_errors(path, 3, 1, g, ts, method="exact")
    assert young.sup_error == exact.sup_error
    assert young.integral_error == pytest.approx(exact.integral_error, abs=2e-3)
    zero = PowerTestFunction(m=1, c=0.0)
    assert path_errors(path, 3, 1, zero, ts, method="exact").integral_error == 0.0
    with pytest.raises(ValueError):
        path_errors(path, 3, 1, g, ts, method="other")


def test_exact_integral_single_block():
    path = piecewise_path([0, 1], [0, 1], 256)
    U = upcrossing_field(embed_walk(path, 1), 1, [0.0, 1.0])
    g = PowerTestFunction(m=1, a=1.0, b=1.0, c=1.0)
    iu, _ = exact_integrals(U, OccupationDensity(path, 0.5), g, 1.0)
    # upcrossings at t=.5 over (0, .5] and t=1 over (.5, 1]: only the first contributes
    assert iu == pytest.approx(2 * 0.5 * (1.0 - 0.5) * 0.5)


def test_summation_by_parts(rng):
    ts = np.linspace(0, 1, 6); xs = np.linspace(-1, 1, 7)
    zero = SampledFunction2D(ts, xs, np.zeros((6, 7)))
    g = SampledFunction2D(ts, xs, rng.normal(size=(6, 7)))
    assert summation_by_parts_terms(g, zero) == (0.0, 0.0)
    Lv = np.cumsum(np.abs(rng.normal(size=(6, 7))), axis=0); Lv[0] = 0
    L = SampledFunction2D(ts, xs, Lv)
    const = SampledFunction2D(ts, xs, np.full((6, 7), 2.5))
    lhs, rhs = summation_by_parts_terms(const, L)
    assert lhs == pytest.approx(2.5 * (Lv[-1, -1] - Lv[-1, 0])) and lhs == pytest.approx(rhs)
    lhs, rhs = summation_by_parts_terms(g, L)
    assert summation_by_parts_check(g, L) <= 1e-12 * max(1.0, abs(lhs))
    with pytest.raises(ValueError):
        summation_by_parts_terms(g, SampledFunction2D(ts, xs, Lv + 1))


def test_field_norms_flat_and_bruteforce():
    flat = BrownianPath(np.linspace(0, 1, 257), np.zeros(257))
    U = upcrossing_field(embed_walk(flat, 1), 1, np.linspace(0, 1, 5))
    assert field_norms(U) == (0.0, 0.0)
    path = stop_at_exit(simulate_bm(1.0, 2 ** 10, 13), 1)
    U = upcrossing_field(embed_walk(path, 2), 1, np.linspace(0, 1, 9))
    vals = U.on_grid(U.t_grid, U.x_levels)
    n1 = max(p_variation_bruteforce(vals[:, j], 1.0).value for j in range(vals.shape[1]))
    n2 = max(p_variation_bruteforce(vals[i], 2.5).value ** 2.5 for i in range(vals.shape[0]))
    a, b = field_norms(U, 0.5)
    assert a == pytest.approx(n1) and b == pytest.approx(n2)


def test_experiments_small_and_deterministic():
    rows = convergence_experiment([1, 2], 3, seed0=5, m=1, n_t=9, method="exact")
    again = convergence_experiment([1, 2], 3, seed0=5, m=1, n_t=9, method="exact")
    assert rows == again and [r["k"] for r in rows] == [1, 2]
    mom = bivariation_moments([1, 2], 3, seed0=5, m=1)
    assert all(r["ci_low_norm_1"] <= r["mean_norm_1"] <= r["ci_high_norm_1"] for r in mom)
    with pytest.raises(UndersamplingError):
        convergence_experiment([3], 1, 0, n_steps=2 ** 11)
