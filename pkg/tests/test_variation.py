import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from young2d.functions import SampledFunction1D, SampledFunction2D, SizeError
from young2d.variation import (bivariation_x, bivariation_y, check_holder_control,
                               joint_partition_sum, joint_variation, p_variation,
                               p_variation_bruteforce, partition_sum)

values = hnp.arrays(np.float64, st.integers(2, 12),
                    elements=st.floats(-10, 10, allow_nan=False, allow_infinity=False))
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0])


def grid2d(rng, nx, ny):
    return SampledFunction2D(np.sort(rng.random(nx)) + np.arange(nx),
                             np.sort(rng.random(ny)) + np.arange(ny), rng.normal(size=(nx, ny)))


def _close(a, b):
    return abs(a - b) <= 1e-12 * max(abs(a), abs(b)) + 1e-14


@pytest.mark.parametrize("vals, p, expected", [
    ([0, 0.5, 1], 1, 1.0),
    ([0, 1, 0], 2, np.sqrt(2)),
    ([3, 3, 3], 1.5, 0.0),
    ([2.0, -1.5], 3.7, 3.5),
])
def test_p_variation_examples(vals, p, expected):
    assert p_variation(np.array(vals, float), p).value == pytest.approx(expected, abs=1e-15)
    assert p_variation_bruteforce(np.array(vals, float), p).value == pytest.approx(expected, abs=1e-15)


def test_rejects_sub_unit_exponent():
    with pytest.raises(ValueError):
        p_variation(np.array([0.0, 1.0]), 0.5)


def test_bruteforce_size_cap():
    with pytest.raises(SizeError):
        p_variation_bruteforce(np.zeros(21), 2)


@given(values, exponents)
def test_dp_matches_bruteforce(v, p):
    assert _close(p_variation(v, p).value, p_variation_bruteforce(v, p).value)


@given(values, exponents)
def test_optimal_subset_reproduces_value(v, p):
    r = p_variation(v, p)
    assert r.optimal_subset[0] == 0 and r.optimal_subset[-1] == v.size - 1
    assert _close(partition_sum(v, p, r.optimal_subset), r.value)


@given(values, st.floats(1, 4), st.floats(1, 4))
def test_monotone_in_exponent(v, p, q):
    p, q = min(p, q), max(p, q)
    assert p_variation(v, q).value <= p_variation(v, p).value * (1 + 1e-12) + 1e-14


@given(values)
def test_p_one_is_total_variation(v):
    assert _close(p_variation(v, 1).value, float(np.sum(np.abs(np.diff(v)))))


def test_sampled_function_input():
    f = SampledFunction1D([0, 1, 2, 3], [0, 2, 1, 3])
    assert p_variation(f, 1).value == pytest.approx(5.0)


def test_bivariation_examples():
    xs = ys = [0.0, 1.0]
    F = SampledFunction2D.from_callable(lambda x, y: x * y, xs, ys)
    assert bivariation_x(F, 1).value == pytest.approx(1.0)
    assert bivariation_y(F, 1).value == pytest.approx(1.0)
    g = np.linspace(0, 1, 5)
    A = SampledFunction2D.from_callable(lambda x, y: np.sin(3 * x) + y ** 2, g, g)
    assert bivariation_x(A, 2).value == pytest.approx(0.0, abs=1e-14)
    assert bivariation_y(A, 1).value == pytest.approx(0.0, abs=1e-14)


def test_bivariation_matches_pair_enumeration(rng):
    for _ in range(5):
        F = grid2d(rng, 6, 6)
        for p in (1.0, 2.0):
            best_x = max(p_variation_bruteforce(F.values[:, a] - F.values[:, b], p).value
                         for a, b in itertools.combinations(range(6), 2))
            best_y = max(p_variation_bruteforce(F.values[a] - F.values[b], p).value
                         for a, b in itertools.combinations(range(6), 2))
            assert _close(bivariation_x(F, p).value, best_x)
            assert _close(bivariation_y(F, p).value, best_y)


def _joint_bruteforce(F, p):
    nx, ny = F.values.shape
    best = 0.0
    for rm in itertools.product((0, 1), repeat=nx - 2):
        rows = [0] + [i + 1 for i, k in enumerate(rm) if k] + [nx - 1]
        for cm in itertools.product((0, 1), repeat=ny - 2):
            cols = [0] + [j + 1 for j, k in enumerate(cm) if k] + [ny - 1]
            best = max(best, joint_partition_sum(F, p, rows, cols))
    return best


def test_joint_variation_examples():
    g = np.linspace(0, 1, 6)
    G = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    assert joint_variation(G, 1).value == pytest.approx(1.0)
    A = SampledFunction2D.from_callable(lambda x, y: x ** 3 - np.cos(y), g, g)
    assert joint_variation(A, 2).value == pytest.approx(0.0, abs=1e-14)


def test_joint_exact_equals_subgrid_enumeration(rng):
    for _ in range(4):
        F = grid2d(rng, 5, 5)
        for p in (1.0, 2.0, 3.0):
            ex = joint_variation(F, p, "exact")
            assert _close(ex.value, _joint_bruteforce(F, p))
            rows, cols = ex.optimal_subset
            assert _close(joint_partition_sum(F, p, rows, cols), ex.value)


def test_joint_heuristic_is_bracketed(rng):
    for _ in range(5):
        F = grid2d(rng, 7, 6)
        full = joint_partition_sum(F, 2, range(7), range(6))
        h = joint_variation(F, 2, "heuristic")
        assert not h.exact
        assert full * (1 - 1e-12) <= h.value <= joint_variation(F, 2, "exact").value * (1 + 1e-12)


def test_joint_exact_size_cap(rng):
    with pytest.raises(SizeError):
        joint_variation(grid2d(rng, 11, 3), 2, "exact")
    assert joint_variation(grid2d(rng, 12, 12), 2, "heuristic").value > 0


def test_holder_examples():
    g = np.linspace(0, 1, 9)
    G = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    assert check_holder_control(G, 1.0, 1.5, 3.0).holds
    A = SampledFunction2D.from_callable(lambda x, y: 5 * x + np.exp(y), g, g)
    rep = check_holder_control(A, 1e-6, 2.0, 2.0)
    assert rep.holds and rep.worst_ratio < 1e-6


def test_holder_spike_is_located():
    g = np.linspace(0, 1, 9)
    V = np.zeros((9, 9))
    C, pt, qt = 1.0, 2.0, 2.0
    mesh = 1 / 8
    V[4, 5] = 2 * C * mesh ** (1 / pt + 1 / qt)
    rep = check_holder_control(SampledFunction2D(g, g, V), C, pt, qt)
    assert not rep.holds
    assert rep.worst_ratio == pytest.approx(2.0)
    i1, i2, j1, j2 = rep.worst_rectangle
    assert i2 - i1 == 1 and j2 - j1 == 1 and i1 in (3, 4) and j1 in (4, 5)


def test_holder_rejects_bad_parameters():
    g = np.linspace(0, 1, 3)
    G = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    with pytest.raises(ValueError):
        check_holder_control(G, 1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        check_holder_control(G, 0.0, 2.0, 2.0)
