import numpy as np
import pytest
from hypothesis import given, strategies as st

from young2d.functions import HypothesisWarning, SampledFunction1D, SampledFunction2D
from young2d.integral import (chain_sums, corner_term, double_difference, rs_sum_1d,
                             step_integral_2d, telescope_delta, young_1d, young_2d,
                             young_bound_1d)
from young2d.partitions import TaggedPartition, build_chain, dyadic_chain, make_step_1d, make_step_2d
from young2d.variation import bivariation_x, bivariation_y


def smooth_pair(rng, n=17):
    xs = np.linspace(0, 1, n); ys = np.linspace(0, 1, n)
    cf = rng.normal(size=4); cg = rng.normal(size=4)
    F = SampledFunction2D.from_callable(
        lambda x, y: cf[0] * np.sin(3 * x + cf[1]) * np.cos(2 * y) + cf[2] * x * y ** 2 + cf[3], xs, ys)
    G = SampledFunction2D.from_callable(
        lambda x, y: cg[0] * np.sin(4 * x * y) + cg[1] * x ** 2 * y + cg[2] * np.exp(x - y) + cg[3] * x, xs, ys)
    return F, G


def test_rs_sum_examples():
    xs = np.linspace(0, 1, 5)
    g = SampledFunction1D(xs, xs ** 2)
    part = TaggedPartition.with_midpoints([0, 0.5, 1])
    const = make_step_1d(SampledFunction1D(xs, np.full(5, 3.0)), part)
    assert rs_sum_1d(const, g) == pytest.approx(3.0)
    ident = make_step_1d(SampledFunction1D(xs, xs), part)
    assert rs_sum_1d(ident, SampledFunction1D(xs, np.full(5, 2.0))) == 0.0
    assert rs_sum_1d(ident, SampledFunction1D(xs, xs)) == pytest.approx(0.5)


def test_young_1d_examples():
    x = np.linspace(0, 1, 4097)
    f, g = SampledFunction1D(x, x ** 2), SampledFunction1D(x, x ** 3)
    r = young_1d(f, g, tol=1e-3, max_depth=12)
    assert r.converged and r.depth_reached[0] <= 12
    assert r.value == pytest.approx(0.6, abs=1e-3)
    c = young_1d(lambda t: 2.5, lambda t: t ** 3, tol=1e-9, interval=(0, 2))
    assert c.value == pytest.approx(20.0) and c.depth_reached == (1,)
    assert young_1d(f, SampledFunction1D(x, np.ones_like(x))).value == 0.0


def test_young_1d_reports_nonconvergence():
    r = young_1d(lambda t: np.sign(t - 1 / 3), lambda t: np.sign(t - 1 / 3), tol=1e-12,
                 max_depth=5, interval=(0, 1))
    assert not r.converged and r.depth_reached == (5,)


def test_young_bound_1d():
    x = np.linspace(0, 1, 65)
    f, g = SampledFunction1D(x, x ** 2), SampledFunction1D(x, x ** 3)
    assert young_bound_1d(f, g, 1, 1) == pytest.approx(1 + np.pi ** 2 / 6)
    assert young_bound_1d(SampledFunction1D(x, 0 * x), g, 1, 1) == 0.0
    with pytest.raises(ValueError):
        young_bound_1d(f, g, 2, 2)


def test_step_integral_2d_examples(rng):
    xs = np.linspace(0, 1, 6); ys = np.linspace(-1, 2, 5)
    G = SampledFunction2D(xs, ys, rng.normal(size=(6, 5)))
    px = TaggedPartition.with_midpoints([0, 0.3, 1]); py = TaggedPartition.with_midpoints([-1, 0.5, 2])
    ones = make_step_2d(SampledFunction2D(xs, ys, np.ones((6, 5))), px, py)
    corner = G(1, 2) - G(1, -1) - G(0, 2) + G(0, -1)
    assert step_integral_2d(ones, G) == pytest.approx(corner)
    F = make_step_2d(SampledFunction2D(xs, ys, rng.normal(size=(6, 5))), px, py)
    add = SampledFunction2D.from_callable(lambda x, y: np.sin(5 * x) + y ** 3, xs, ys)
    assert step_integral_2d(F, add) == pytest.approx(0.0, abs=1e-12)


def test_step_integral_2d_matches_double_loop(rng):
    xs = np.linspace(0, 1, 9)
    F = SampledFunction2D(xs, xs, rng.normal(size=(9, 9)))
    G = SampledFunction2D(xs, xs, rng.normal(size=(9, 9)))
    px = TaggedPartition([0, 0.2, 0.5, 0.7, 1], [0.1, 0.2, 0.6, 0.9])
    py = TaggedPartition([0, 0.4, 0.6, 0.8, 1], [0.0, 0.5, 0.8, 0.85])
    total = 0.0
    for j in range(1, 5):
        for i in range(1, 5):
            dd = (G(px.points[i], py.points[j]) - G(px.points[i - 1], py.points[j])
                  - G(px.points[i], py.points[j - 1]) + G(px.points[i - 1], py.points[j - 1]))
            total += F(px.tags[i - 1], py.tags[j - 1]) * dd
    assert step_integral_2d(make_step_2d(F, px, py), G) == pytest.approx(total, rel=1e-12)


@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.integers(1, 5))
def test_telescope_matches_direct(seed, n, n2):
    rng = np.random.default_rng(seed)
    F, G = SampledFunction2D(np.linspace(0, 1, 9), np.linspace(0, 2, 9), rng.normal(size=(9, 9))), \
        SampledFunction2D(np.linspace(0, 1, 9), np.linspace(0, 2, 9), rng.normal(size=(9, 9)))
    cx, cy = dyadic_chain(0, 1, 5), dyadic_chain(0, 2, 5)
    S = chain_sums(F, G, cx, cy)
    direct = S[n, n2] - S[n - 1, n2] - S[n, n2 - 1] + S[n - 1, n2 - 1]
    tel = telescope_delta(F, G, cx, cy, n, n2)
    assert abs(direct - tel) <= 1e-10 * max(1.0, abs(direct))


def test_telescope_single_term():
    xs = ys = [0.0, 0.5, 1.0]
    F = SampledFunction2D(xs, ys, np.array([[0, 0, 0], [0, 1, 2], [0, 3, 7]], float))
    G = SampledFunction2D(xs, ys, np.array([[0, 0, 0], [0, 5, 1], [0, 2, 4]], float))
    c = dyadic_chain(0, 1, 1)
    # one term: dd F on the cell ending at (t_2, s_2), dd G on the cell ending at (t_1, s_1)
    ddF = 7 - 2 - 3 + 1
    ddG = 5 - 0 - 0 + 0
    assert telescope_delta(F, G, c, c, 1, 1) == ddF * ddG
    assert telescope_delta(SampledFunction2D(xs, ys, np.full((3, 3), 2.0)), G, c, c, 1, 1) == 0.0
    with pytest.raises(ValueError):
        telescope_delta(F, G, c, c, 2, 1)


def test_s00_is_corner_term(rng):
    F, G = smooth_pair(rng)
    c = build_chain(F.grid_x.points)
    S = chain_sums(F, G, c, c)
    assert S[0, 0] == corner_term(F, G, F.domain)


def test_young_2d_anchor():
    g = np.linspace(0, 1, 1025)
    F = SampledFunction2D.from_callable(lambda x, y: x ** 2 * y ** 2, g, g)
    G = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    r = young_2d(F, G, tol=1e-3)
    assert r.converged and r.value == pytest.approx(1 / 9, abs=1e-3)


def test_young_2d_trivial_cases(rng):
    g = np.linspace(0, 1, 9)
    G = SampledFunction2D(g, g, rng.normal(size=(9, 9)))
    with pytest.warns(HypothesisWarning):
        r = young_2d(lambda x, y: 3.0, G, domain=((0, 1), (0, 1)), tol=1e-12, max_depth=3)
    assert r.value == pytest.approx(3 * (G(1, 1) - G(1, 0) - G(0, 1) + G(0, 0)))
    F = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    add = SampledFunction2D.from_callable(lambda x, y: x ** 2 - y, g, g)
    assert young_2d(F, add, max_depth=6).value == pytest.approx(0.0, abs=1e-14)


def test_young_2d_bilinear(rng):
    F1, G1 = smooth_pair(rng)
    F2, G2 = smooth_pair(rng)
    a, b = rng.normal(size=2)
    opts = dict(tol=0.0, max_depth=6, check_axes=False)
    lin = SampledFunction2D(F1.grid_x, F1.grid_y, a * F1.values + b * F2.values)
    assert young_2d(lin, G1, **opts).value == pytest.approx(
        a * young_2d(F1, G1, **opts).value + b * young_2d(F2, G1, **opts).value, rel=1e-10)
    lin = SampledFunction2D(G1.grid_x, G1.grid_y, a * G1.values + b * G2.values)
    assert young_2d(F1, lin, **opts).value == pytest.approx(
        a * young_2d(F1, G1, **opts).value + b * young_2d(F1, G2, **opts).value, rel=1e-10)


def test_min_depth_prevents_early_stop():
    # a bump invisible to the coarse levels makes two successive deltas vanish
    g = np.linspace(0, 1, 257)
    V = np.zeros((257, 257)); V[150:160, 150:160] = 1.0
    F = SampledFunction2D(g, g, V)
    G = SampledFunction2D.from_callable(lambda x, y: x * y, g, g)
    early = young_2d(F, G, tol=1e-9, max_depth=10)
    assert early.value == 0.0 and early.depth_reached == (2, 2)
    late = young_2d(F, G, tol=1e-9, max_depth=10, min_depth=8)
    assert late.converged and late.value == pytest.approx((10 / 256) ** 2, rel=1e-9)


@pytest.mark.parametrize("p, q, alpha", [(1.0, 1.0, 0.5), (1.5, 2.0, 0.3), (2.0, 1.0, 0.7)])
def test_dyadic_double_difference_bound(rng, p, q, alpha):
    D = 5
    g = np.linspace(0, 1, 2 ** D + 1)
    for _ in range(5):
        V = np.cumsum(np.cumsum(rng.normal(size=(g.size, g.size)), 0), 1) / g.size
        V[0, :] = 0; V[:, 0] = 0
        F = SampledFunction2D(g, g, V)
        n1, n2 = bivariation_x(F, p).value, bivariation_y(F, q).value
        for m in range(D + 1):
            for m2 in range(D + 1):
                sub = V[::2 ** (D - m), ::2 ** (D - m2)]
                lhs = np.sum(np.abs(double_difference(sub)))
                rhs = 4 * 2 ** (m + m2) * (n1 / 2 ** (m / p)) ** alpha * (n2 / 2 ** (m2 / q)) ** (1 - alpha)
                assert lhs <= rhs * (1 + 1e-12)
