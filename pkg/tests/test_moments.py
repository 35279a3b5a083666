from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import X, to_sympy
from sphermean.generators import DiscreteMeasure, bessel_coeffs, spectral_projection_discrete
from sphermean.moments import (check_recursion, common_zero_sample, harmonic_minor, moment_family, moment_poly,
                               random_measure)
from sphermean.polynomials import Poly, homogeneous_parts, is_harmonic, laplacian

x1, x2, x3 = Poly.variables(3)
DIPOLE = DiscreteMeasure(((1, 0, 0), (-1, 0, 0)), (1, -1))
QUAD = DiscreteMeasure(((1, 0), (-1, 0), (0, 1), (0, -1)), (1, 1, -1, -1))

coord = st.fractions(min_value=-4, max_value=4, max_denominator=3)
weight = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda w: w != 0)


@st.composite
def measures(draw, dim=3):
    pts = draw(st.lists(st.tuples(*[coord] * dim), min_size=1, max_size=5, unique=True))
    ws = draw(st.lists(weight, min_size=len(pts), max_size=len(pts)))
    return DiscreteMeasure(tuple(pts), tuple(ws))


def sympy_moment(mu, k, dim):
    xs = X[:dim]
    c = bessel_coeffs(dim, k)[k]
    expr = sum(sp.Rational(w.numerator, w.denominator)
               * sum((x - sp.Rational(p.numerator, p.denominator)) ** 2 for x, p in zip(xs, pt)) ** k
               for pt, w in zip(mu.points, mu.weights))
    return sp.expand(sp.Rational(c.numerator, c.denominator) * expr)


@settings(max_examples=30, deadline=None)
@given(measures(), st.integers(0, 4))
def test_moment_poly_matches_sympy(mu, k):
    assert to_sympy(moment_poly(mu, k, 3)) == sympy_moment(mu, k, 3)


@settings(max_examples=40, deadline=None)
@given(measures(), st.integers(1, 5))
def test_degree_and_top_part(mu, k):
    q = moment_poly(mu, k, 3)
    assert q.is_zero() or q.degree <= 2 * k
    total = sum(mu.weights, F(0))
    r2 = x1**2 + x2**2 + x3**2
    top = [p for d, p in homogeneous_parts(q) if d == 2 * k]
    expected = r2**k * (bessel_coeffs(3, k)[k] * total)
    assert (top[0] if top else Poly.zero(3)) == expected


def test_examples():
    delta = DiscreteMeasure(((F(1, 2), 3, -1),), (1,))
    assert moment_poly(delta, 0, 3) == Poly.const(1, 3)
    origin = DiscreteMeasure(((0, 0, 0),), (1,))
    assert moment_poly(origin, 1, 3) == (x1**2 + x2**2 + x3**2) * F(-1, 6)
    assert moment_poly(DIPOLE, 0, 3).is_zero()


def test_recursion_random_measures():
    rng = np.random.default_rng(7)
    for dim in (2, 3):
        for _ in range(50):
            assert check_recursion(random_measure(rng, dim), 6, dim)


def test_recursion_fails_without_normalization():
    mu = DiscreteMeasure(((1, 2, 0), (0, 1, 1)), (3, -1))
    assert not check_recursion(mu, 6, 3, coeffs=[1] * 7)
    # but Laplacian(Q_k) and Q_{k-1} are still proportional: Laplacian |x|^{2k} = 2k(2k+d-2)|x|^{2k-2}
    fam = moment_family(mu, 3, 3, coeffs=[1] * 4)
    assert laplacian(fam.polys[2]) == fam.polys[1] * (2 * 2 * (4 + 1))


def test_empty_measure():
    empty = DiscreteMeasure((), ())
    assert check_recursion(empty, 6, 3)
    assert harmonic_minor(empty, 6, 3) is None


def test_harmonic_minor_fixtures():
    k0, H = harmonic_minor(DiscreteMeasure(((0, 0, 0),), (1,)), 8, 3)
    assert (k0, H) == (0, Poly.const(1, 3))
    k0, H = harmonic_minor(DIPOLE, 8, 3)
    assert k0 == 1 and H == x1 * F(2, 3)
    y1, y2 = Poly.variables(2)
    k0, H = harmonic_minor(QUAD, 8, 2)
    c2 = bessel_coeffs(2, 2)[2]
    assert k0 == 2 and H == (y1**2 - y2**2) * (8 * c2)


@settings(max_examples=40, deadline=None)
@given(measures())
def test_harmonic_minor_is_harmonic(mu):
    res = harmonic_minor(mu, 6, 3)
    if res is not None:
        assert is_harmonic(res[1])


@pytest.mark.parametrize("p", [(1, 0, 0), (F(1, 2), -2, 1), (0, 3, F(-2, 3))])
def test_odd_measures_vanish_on_mirror(p):
    """A measure odd under a reflection has every Q_k vanishing on the mirror plane."""
    mu = DiscreteMeasure((tuple(p), tuple(-F(c) for c in p)), (1, -1))
    normal = [F(c) for c in p]
    # parametrize the plane <x, p> = 0 by two spanning vectors
    a = sp.Matrix([[sp.Rational(str(c)) for c in normal]]).nullspace()
    s, t = sp.symbols("s t")
    point = s * a[0] + t * a[1]
    for q in moment_family(mu, 6, 3).polys:
        assert sp.expand(to_sympy(q).subs(dict(zip(X, point)), simultaneous=True)) == 0


def test_quadrupole_vanishes_on_diagonals():
    for q in moment_family(QUAD, 6, 2).polys:
        for sign in (1, -1):
            expr = sp.expand(to_sympy(q).subs({X[1]: sign * X[0]}))
            assert expr == 0


def test_common_zero_sample():
    grid = np.array([[0.0, a, b] for a in np.linspace(-3, 3, 7) for b in np.linspace(-3, 3, 7)])
    got = common_zero_sample(DIPOLE, 8, grid, 1e-10)
    assert len(got) == len(grid)
    off = common_zero_sample(DIPOLE, 8, np.array([[1.0, 0.0, 0.0], [1.0, 2.0, 3.0]]), 1e-10)
    assert len(off) == 0
    single = DiscreteMeasure(((0, 0, 0),), (1,))
    assert len(common_zero_sample(single, 8, grid, 1e-10)) == 0


def test_common_zeros_match_spectral_projection():
    grid = [(F(0), F(a, 2), F(b, 3)) for a in range(-4, 5) for b in range(-4, 5)]
    grid += [(F(1, 3), F(1), F(0)), (F(2), F(-1), F(1))]
    zeros = common_zero_sample(DIPOLE, 8, np.array(grid, dtype=float), 1e-10)
    zero_set = {tuple(z) for z in zeros}
    lams = np.arange(0.0, 10.01, 0.1)
    for p in grid:
        worst = max(abs(spectral_projection_discrete(DIPOLE, lam, p)) for lam in lams)
        if tuple(float(c) for c in p) in zero_set:
            assert worst <= 1e-8
        else:
            assert worst > 1e-8
