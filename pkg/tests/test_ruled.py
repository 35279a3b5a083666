from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphermean.io import parse_chart
from sphermean.polynomials import LinearForm, Poly, divisible_by_square_linear, homogeneous_parts
from sphermean.ruled import (Cone, Cuspidal, Inconclusive, NotSingular, ParallelLines, Plane, RegularPoint,
                             RuledChart, canonical_form, chart_line_distance, circular_cone_chart,
                             classify_singularity, concurrent_plane_chart, cylinder_chart, descend_evenness,
                             doubled_whitney_chart, extremal_lines, hyperboloid_family, line_distance,
                             make_chart, odd_power_chart, orthogonalize_chart, plane_chart, puiseux_graph,
                             reconstruction_residual, recenter, singular_shift, tilted_odd_chart,
                             whitney_chart)
from sphermean.ruled.canonical import TruncationTooLow
from sphermean.series import Series, VecSeries

fr = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def vec(order, *cols):
    return VecSeries([Series(c, order) for c in cols])


@st.composite
def random_charts(draw, order=6):
    """Polynomial base curve and a direction field with |e(0)| = 1 before normalization."""
    u = [draw(st.lists(fr, min_size=order + 1, max_size=order + 1)) for _ in range(3)]
    e0 = draw(st.sampled_from([(1, 0, 0), (0, 1, 0), (F(3, 5), F(4, 5), 0), (F(2, 3), F(1, 3), F(2, 3))]))
    e = [[c] + draw(st.lists(fr, min_size=3, max_size=3)) for c in e0]
    return make_chart(vec(order, *u), vec(order, *e))


@st.composite
def singular_charts(draw, order=7):
    """Charts with a singular point at (0, 0): u = t^m (1, 0, 0) + higher terms, e(0) = (0, 1, 0)."""
    m = draw(st.integers(2, 3))
    tail = [draw(st.lists(fr, min_size=order - m, max_size=order - m)) for _ in range(3)]
    u = [[0] * m + [1] + tail[0], [0] * (m + 1) + tail[1], [0] * (m + 1) + tail[2]]
    e = [[0] + draw(st.lists(fr, min_size=3, max_size=3)), [1] + draw(st.lists(fr, min_size=3, max_size=3)),
         [0] + draw(st.lists(fr, min_size=3, max_size=3))]
    return make_chart(vec(order, *u), vec(order, *e))


# -- charts ------------------------------------------------------------------


def test_fixture_charts_are_unit():
    for ch in (whitney_chart(8), circular_cone_chart(8), plane_chart(8), cylinder_chart(8), tilted_odd_chart(8)):
        assert ch.is_unit()


@settings(max_examples=30, deadline=None)
@given(random_charts())
def test_orthogonalize_properties(chart):
    o = orthogonalize_chart(chart)
    g = o.u.derivative().dot(o.e)
    assert g.is_zero() and g.order == chart.order - 1
    again = orthogonalize_chart(o)
    assert again.u.coeffs == o.u.coeffs and again.e.coeffs == o.e.coeffs
    # the new base point at t = 0 lies on the original ruling
    assert o.u.coeff(0) == chart.u.coeff(0)


def test_orthogonalize_examples():
    cyl = cylinder_chart(8)
    assert orthogonalize_chart(cyl).u.coeffs == cyl.u.coeffs
    line = RuledChart(vec(6, [0, 1], [0], [0]), vec(6, [1], [0], [0]))
    assert orthogonalize_chart(line).u.is_zero()


def test_orthogonalize_at_other_base():
    ch = whitney_chart(8)
    o = orthogonalize_chart(ch, F(1, 2))
    lam_at = [a - b for a, b in zip(o.u.evaluate(0.5), ch.u.evaluate(0.5))]
    # at t0 the base point moves only along the ruling, and not at all here
    assert np.allclose(lam_at, 0.0, atol=1e-15)


def test_recenter_is_polynomial_shift():
    ch = RuledChart(vec(4, [1, 2, 3], [0, 1], [5]), vec(4, [0], [1], [0]))
    sh = recenter(ch, F(1, 2))
    assert sh.u.coeff(0) == (F(1) + 1 + F(3, 4), F(1, 2), F(5))


# -- ruling lines ------------------------------------------------------------------


def test_line_distance_examples():
    d, lam, mu = line_distance((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0))
    assert d == pytest.approx(1.0) and lam == pytest.approx(0) and mu == pytest.approx(0)
    assert chart_line_distance(whitney_chart(8), 0.3, 0.3)[0] == 0.0
    with pytest.raises(ParallelLines):
        line_distance((0, 0, 0), (1, 0, 0), (0, 1, 0), (-2, 0, 0))


def test_line_distance_against_least_squares(rng):
    for _ in range(300):
        p1, d1, p2, d2 = rng.normal(size=(4, 3)) * 3
        d, lam, mu = line_distance(p1, d1, p2, d2)
        n1, n2 = d1 / np.linalg.norm(d1), d2 / np.linalg.norm(d2)
        sol, *_ = np.linalg.lstsq(np.column_stack([n1, -n2]), p2 - p1, rcond=None)
        assert lam == pytest.approx(sol[0], abs=1e-9)
        assert mu == pytest.approx(sol[1], abs=1e-9)
        assert d == pytest.approx(np.linalg.norm(p1 + sol[0] * n1 - p2 - sol[1] * n2), abs=1e-9)
        # symmetry and orthogonality of the connecting segment
        d_rev, _, _ = line_distance(p2, d2, p1, d1)
        assert abs(d - d_rev) <= 1e-12
        seg = (p1 + lam * n1) - (p2 + mu * n2)
        assert abs(seg @ n1) <= 1e-10 and abs(seg @ n2) <= 1e-10


def test_distance_semicontinuity(rng):
    for _ in range(10):
        p, q, d = rng.normal(size=(3, 3))
        ch = RuledChart(vec(3, [p[0], q[0], 1], [p[1], q[1]], [p[2], q[2]]),
                        vec(3, [d[0], 1], [d[1], 0, 1], [d[2] + 3]))
        t0, s0 = -0.4, 0.5
        base = chart_line_distance(ch, t0, s0)[0]
        for k in range(30, 45):
            h = 2.0**-k
            assert chart_line_distance(ch, t0 + h, s0 - h)[0] <= base + 1e-8
        # approaching the diagonal the rulings get close (until they are numerically
        # parallel, which line_distance refuses below 1 - c^2 = 1e-12)
        near = [chart_line_distance(ch, t0 + 2.0**-k, t0)[0] for k in (4, 8, 12, 16)]
        assert near == sorted(near, reverse=True) and near[-1] <= 1e-4
        with pytest.raises(ParallelLines):
            chart_line_distance(ch, t0 + 2.0**-40, t0)


def test_extremal_lines():
    cone = extremal_lines(circular_cone_chart(8), resolution=21, window=(-0.5, 0.5))
    assert cone.dmax <= 1e-12
    hyp = extremal_lines(hyperboloid_family((-1.0, 1.0)), resolution=41)
    assert hyp.dmax > 0
    assert {round(abs(hyp.t0), 6), round(abs(hyp.s0), 6)} == {1.0}
    # dense-grid oracle
    fam = hyperboloid_family((-1.0, 1.0))
    grid = np.linspace(-1, 1, 201)
    best = 0.0
    for t in grid[::5]:
        for s in grid:
            if t != s:
                best = max(best, line_distance(*fam.line(t), *fam.line(s))[0])
    assert hyp.dmax >= best - 1e-9
    single = RuledChart(vec(4, [0, 1], [0], [0]), vec(4, [1], [0], [0]))
    rep = extremal_lines(single, resolution=11)
    assert rep.dmax == 0 and rep.skipped_parallel == 11 * 10


# -- singular points and canonical forms ----------------------------------------


def test_singular_shift_examples():
    sh = singular_shift(whitney_chart(8), 0, 0)
    assert sh.m == 2 and sh.lambda0 == 0
    assert sh.v.coeffs[:3] == [(0, 0, 0), (0, 0, 0), (1, 0, 0)] and sh.v.valuation() == 2
    cone = singular_shift(circular_cone_chart(8))
    assert cone.is_cone and cone.point == (0, 0, 0) and cone.lambda0 == -5
    with pytest.raises(NotSingular):
        singular_shift(cylinder_chart(8))
    with pytest.raises(NotSingular):
        singular_shift(whitney_chart(8), 0, 1)


def test_canonical_form_whitney():
    cc = canonical_form(whitney_chart(8))
    assert cc.m == 2
    assert cc.basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert cc.j0 == 3
    # D = sigma s^3 exactly: x3 = lam t with x1 = t^2 = s^2, x2 = lam = sigma s^2
    alpha, beta, c = cc.D_terms()[0]
    assert (alpha, beta, c) == (3, 1, 1)
    assert reconstruction_residual(cc) == 0
    assert descend_evenness(cc) is cc  # even m but D has an odd term: nothing to descend


def test_canonical_form_plane():
    cc = canonical_form(plane_chart(8))
    assert cc.D.is_zero()
    assert isinstance(classify_singularity(plane_chart(8)), Plane)


@settings(max_examples=25, deadline=None)
@given(singular_charts(), st.lists(fr, min_size=5, max_size=5))
def test_reconstruction_residual_random(chart, sigmas):
    try:
        cc = canonical_form(chart)
    except TruncationTooLow:
        return
    assert reconstruction_residual(cc) == 0
    for s in sigmas:
        assert reconstruction_residual(cc, s) == 0


def test_descend_evenness():
    cc = canonical_form(doubled_whitney_chart(12))
    assert cc.m == 4 and cc.D.is_even()
    down = descend_evenness(cc)
    assert down.m == 2 and down.descended == 1 and down.j0 == 3
    odd = canonical_form(odd_power_chart(8, 3))
    assert descend_evenness(odd) is odd


# -- verdicts --------------------------------------------------------------------


@pytest.mark.parametrize("order", [6, 8, 10, 12])
def test_whitney_is_cuspidal(order):
    v = classify_singularity(whitney_chart(order))
    assert isinstance(v, Cuspidal)
    assert v.form.is_proportional(LinearForm((0, 0, 1)))
    x1, x2, x3 = Poly.variables(3)
    minor = homogeneous_parts(x3**2 - x2 * x1**2)[0][1]
    assert divisible_by_square_linear(minor).is_proportional(v.form)


@pytest.mark.parametrize("order", [6, 8, 12])
def test_cone_verdict(order):
    v = classify_singularity(circular_cone_chart(order))
    assert isinstance(v, Cone) and v.vertex == (0, 0, 0)


def test_other_verdicts():
    assert isinstance(classify_singularity(cylinder_chart(8)), RegularPoint)
    assert isinstance(classify_singularity(concurrent_plane_chart(8)), Plane)
    assert isinstance(classify_singularity(odd_power_chart(8, 3)), RegularPoint)
    assert isinstance(classify_singularity(doubled_whitney_chart(12)), Cuspidal)
    # not enough coefficients to see past s^m
    assert isinstance(classify_singularity(whitney_chart(2)), Inconclusive)
    # the t^2-reparametrized umbrella truncated before its first D term: D vanishes
    # through the order, yet the data are not planar, so no verdict is possible
    assert isinstance(classify_singularity(doubled_whitney_chart(5)), Inconclusive)


def test_verdict_stable_under_raised_order():
    doc = {"order": 6, "u": [["0", "0", "0"], ["0", "0", "0"], ["1", "0", "0"]],
           "e": [["0", "1", "0"], ["0", "0", "1"]]}
    verdicts = {type(classify_singularity(parse_chart(doc, order=k))) for k in (6, 8, 10, 12)}
    assert verdicts == {Cuspidal}


# -- Puiseux graphs ----------------------------------------------------------------


def canonical_coordinates(cc, chart, t, lam):
    """Direct oracle: project a surface point onto the canonical basis."""
    p = np.array(chart.u.evaluate(t)) + lam * np.array(chart.e.evaluate(t)) - np.array(
        [float(c) for c in cc.point])
    vm, e0, tau = (np.array([float(c) for c in b]) for b in cc.basis)
    return p @ vm / (vm @ vm), p @ e0 / (e0 @ e0), p @ tau / (tau @ tau)


@pytest.mark.parametrize("chart", [odd_power_chart(9, 3, F(1, 2)), tilted_odd_chart(10, 3),
                                   odd_power_chart(11, 5, F(-2))])
def test_puiseux_graph_matches_surface(chart, rng):
    cc = canonical_form(chart)
    g = puiseux_graph(cc)
    assert all(h >= 1 + F(1, cc.m) for h in g.homogeneity)
    for _ in range(50):
        # the truncated direction series is exact only through t^order
        t, lam = rng.uniform(-0.1, 0.1, 2)
        a, b, z = canonical_coordinates(cc, chart, t, lam)
        assert g(a, b) == pytest.approx(z, abs=1e-10)


def test_puiseux_scaling():
    """|z|/r decays like r^(1/m): the ratio |z| / r^(1 + 1/m) is scale invariant."""
    g = puiseux_graph(canonical_form(odd_power_chart(8, 3)))
    assert [nu for nu, _, _ in g.terms] == [F(4, 3)]
    assert g.homogeneity == [F(4, 3)]  # the minimal exponent 1 + 1/m is attained
    th = np.linspace(0, 2 * np.pi, 361)[:-1]
    ratios = []
    for r in (1e-2, 1e-3, 1e-4):
        z = g(r * np.cos(th), r * np.sin(th))
        ratios.append(np.max(np.abs(z)) / r ** (4 / 3))
        assert np.max(np.abs(z)) / r <= 2.0 * r ** (1 / 3)
    assert np.allclose(ratios, ratios[0], rtol=1e-9)


def test_puiseux_needs_odd_m():
    with pytest.raises(ValueError):
        puiseux_graph(canonical_form(whitney_chart(8)))


def test_m1_regular_chart_is_smooth_graph():
    ch = RuledChart(vec(6, [0, 1], [0], [0, 0, 1]), vec(6, [0], [1], [0]))
    with pytest.raises(NotSingular):
        canonical_form(ch)
