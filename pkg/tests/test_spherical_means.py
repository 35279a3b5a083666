import math

import numpy as np
import pytest
from scipy import integrate
from scipy.spatial.transform import Rotation

from sphermean.generators import BumpSpec, DiscreteMeasure, OddPlane, RadialHarmonic, sample_zero_set
from sphermean.polynomials import Poly
from sphermean.spherical_means import (default_radii, mean_table, sphere_rule, spherical_mean,
                                       verify_zero_means, write_means_csv)

x1, x2, x3 = Poly.variables(3)
ONE = Poly.const(1, 3)
RULE = sphere_rule(3, 64)


def sphere_moment(a, b, c):
    """Mean of w1^a w2^b w3^c over the unit sphere (normalized area)."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    g = math.gamma
    return g(1.5) / g(1.5 + (a + b + c) / 2) * g((a + 1) / 2) * g((b + 1) / 2) * g((c + 1) / 2) / g(0.5) ** 3


def test_rule_basics():
    assert RULE.integrate(lambda w: np.ones(len(w))) == pytest.approx(1.0, abs=1e-14)
    assert abs(RULE.integrate(lambda w: w[:, 0] * w[:, 1])) <= 1e-14
    assert RULE.integrate(lambda w: w[:, 0] ** 2) == pytest.approx(1 / 3, abs=1e-12)
    assert np.allclose(np.linalg.norm(RULE.nodes, axis=1), 1.0, atol=1e-15)


@pytest.mark.parametrize("order", [3, 5, 8])
def test_rule_exact_for_low_degree(order):
    """Monomials of total degree up to 2*order - 1 are integrated exactly."""
    rule = sphere_rule(3, order)
    top = 2 * order - 1
    for a in range(top + 1):
        for b in range(top + 1 - a):
            for c in range(top + 1 - a - b):
                got = rule.integrate(lambda w: w[:, 0] ** a * w[:, 1] ** b * w[:, 2] ** c)
                assert got == pytest.approx(sphere_moment(a, b, c), abs=1e-13)


def test_circle_rule():
    rule = sphere_rule(2, 32)
    assert rule.integrate(lambda w: w[:, 0] ** 2) == pytest.approx(0.5, abs=1e-15)
    assert rule.integrate(lambda w: w[:, 0] ** 4 * w[:, 1] ** 2) == pytest.approx(1 / 16, abs=1e-15)


def test_radial_mean_at_center():
    f = RadialHarmonic(BumpSpec(1, 2), ONE)
    for t in (0.5, 1.2, 1.5, 1.9, 3.0):
        assert spherical_mean(f, np.zeros(3), t, RULE) == pytest.approx(f.alpha(t), abs=1e-15)


def test_mean_against_adaptive_quadrature():
    """Independent oracle: scipy's adaptive 2D integration in spherical coordinates."""
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2 + x3 * x1)
    x = np.array([0.4, -0.3, 0.8])
    t = 1.3

    def integrand(phi, theta):
        w = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
        return f(x + t * w) * math.sin(theta) / (4 * math.pi)

    ref, err = integrate.dblquad(integrand, 0, math.pi, 0, 2 * math.pi, epsabs=1e-11, epsrel=1e-11)
    assert spherical_mean(f, x, t, sphere_rule(3, 256)) == pytest.approx(ref, abs=1e-10)
    assert spherical_mean(f, x, t, RULE) == pytest.approx(ref, abs=1e-6 * f.sup_estimate())


def test_translation_equivariance(rng):
    h = x1 * x2 - x3 * x2
    f = RadialHarmonic(BumpSpec(1, 2), h)
    for _ in range(10):
        v = rng.uniform(-3, 3, 3)
        g = RadialHarmonic(BumpSpec(1, 2), h, center=v)
        x = rng.uniform(-2, 2, 3)
        t = rng.uniform(0.1, 4)
        assert abs(spherical_mean(g, x + v, t, RULE) - spherical_mean(f, x, t, RULE)) <= 1e-12


def test_rotation_invariance_rule_symmetries(rng):
    """Rotations the rule maps to itself leave the mean unchanged to rounding."""
    f = RadialHarmonic(BumpSpec(1, 2), ONE)
    order = 64
    for _ in range(10):
        x = rng.uniform(-2, 2, 3)
        t = rng.uniform(0.2, 4)
        k = int(rng.integers(1, 2 * order))
        R = Rotation.from_euler("z", k * math.pi / order).as_matrix()
        for M in (R, np.diag([1.0, -1.0, 1.0]), np.diag([1.0, 1.0, -1.0])):
            assert abs(spherical_mean(f, M @ x, t, RULE) - spherical_mean(f, x, t, RULE)) <= 1e-12


def test_rotation_invariance_general_converges(rng):
    """For arbitrary rotations the discrepancy is quadrature error and shrinks with order."""
    f = RadialHarmonic(BumpSpec(1, 2), ONE)
    cases = [(rng.uniform(-2, 2, 3), rng.uniform(0.2, 4), Rotation.random(random_state=rng).as_matrix())
             for _ in range(10)]
    worst = {}
    for order in (32, 64, 96):
        rule = sphere_rule(3, order)
        worst[order] = max(abs(spherical_mean(f, R @ x, t, rule) - spherical_mean(f, x, t, rule))
                           for x, t, R in cases)
    assert worst[96] < worst[64] < worst[32]
    assert worst[64] <= 1e-4


def test_cone_witness_small():
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2)
    rng = np.random.default_rng(3)
    centers = sample_zero_set(x1 * x2, 20, 4.0, rng)
    rep = verify_zero_means(f, centers, default_radii(20, 8.0), RULE)
    assert rep.max_abs <= 1e-6 * f.sup_estimate()
    assert rep.count == 400
    # an off-cone center dominates the report
    off = np.vstack([centers, [1.0, 1.0, 1.0]])
    rep2 = verify_zero_means(f, off, default_radii(20, 8.0), RULE)
    assert np.allclose(rep2.argmax_center, [1.0, 1.0, 1.0])
    assert rep2.max_abs >= 1e-3 * f.sup_estimate()


def test_refinement_is_stable():
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2)
    centers = sample_zero_set(x1 * x2, 20, 4.0, np.random.default_rng(5))
    radii = default_radii(25, 8.0)
    a = mean_table(f, centers, radii, sphere_rule(3, 64))
    b = mean_table(f, centers, radii, sphere_rule(3, 128))
    assert np.max(np.abs(a - b)) <= 1e-6 * f.sup_estimate()


def test_tilted_plane_convergence():
    """Odd witness about a plane that is not a symmetry plane of the rule: the error is genuine
    quadrature error and decreases as the order grows."""
    g = RadialHarmonic(BumpSpec(0.3, 1.2), ONE, center=(0.6, -0.4, 0.9))
    n = np.array([1.0, 2.0, 2.0]) / 3
    f = OddPlane(np.zeros(3), n, g)
    rng = np.random.default_rng(11)
    basis = np.linalg.svd(n[None, :])[2][1:]
    centers = rng.uniform(-2, 2, size=(15, 2)) @ basis
    radii = default_radii(12, 4.0)
    sup = f.sup_estimate()
    errs = [verify_zero_means(f, centers, radii, sphere_rule(3, k)).max_abs / sup for k in (32, 48, 64)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] <= 1e-3


def test_empty_and_invalid_inputs():
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2)
    rep = verify_zero_means(f, np.zeros((0, 3)), [1.0], RULE)
    assert rep.max_abs == 0 and rep.count == 0
    with pytest.raises(ValueError):
        spherical_mean(f, np.zeros(3), 0.0, RULE)
    with pytest.raises(TypeError):
        spherical_mean(DiscreteMeasure(((0, 0, 0),), (1,)), np.zeros(3), 1.0, RULE)
    with pytest.raises(ValueError):
        sphere_rule(4, 8)


def test_threads_do_not_change_results(monkeypatch):
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2 + x2 * x3)
    centers = np.random.default_rng(0).uniform(-2, 2, size=(12, 3))
    radii = default_radii(10, 5)
    serial = mean_table(f, centers, radii, RULE, threads=1)
    parallel = mean_table(f, centers, radii, RULE, threads=4)
    assert np.array_equal(serial, parallel)
    monkeypatch.setenv("SPHERMEAN_THREADS", "3")
    assert np.array_equal(mean_table(f, centers, radii, RULE), serial)


def test_csv_output(tmp_path):
    f = RadialHarmonic(BumpSpec(1, 2), x1 * x2)
    centers = np.array([[0.0, 1.0, 2.0]])
    radii = [1.0, 2.0]
    table = mean_table(f, centers, radii, RULE)
    path = tmp_path / "m.csv"
    write_means_csv(path, centers, radii, table)
    lines = path.read_text().splitlines()
    assert lines[0] == "cx,cy,cz,t,mean"
    assert len(lines) == 3
    assert float(lines[2].split(",")[-1]) == table[0, 1]
