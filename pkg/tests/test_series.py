from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import assume, given, settings, strategies as st

from sphermean.polynomials import Poly
from sphermean.series import Series, VecSeries, cross, dot

t = sp.symbols("t")
fr = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@st.composite
def series(draw, order=None, valuation=0, unit=False):
    n = draw(st.integers(1, 7)) if order is None else order
    cs = [F(0)] * valuation + draw(st.lists(fr, min_size=n + 1 - valuation, max_size=n + 1 - valuation))
    if unit:
        cs[0] = F(1)
    return Series(cs, n)


def as_expr(s: Series):
    return sum(sp.Rational(c.numerator, c.denominator) * t**j for j, c in enumerate(s.coeffs))


def sympy_coeffs(expr, order):
    ser = sp.series(expr, t, 0, order + 1).removeO()
    return [F(str(sp.expand(ser).coeff(t, j))) for j in range(order + 1)]


def perturb(s: Series, extra):
    """Same known coefficients, arbitrary unknown tail."""
    return Series(list(s.coeffs) + list(extra), s.order + len(extra))


def test_exp_log_against_sympy():
    order = 9
    x = Series.variable(order)
    # 1/(1 - t) and (1 + t)^(1/3)
    assert list((1 - x).inverse().coeffs) == [F(1)] * (order + 1)
    cube = (1 + x).power(F(1, 3))
    assert list(cube.coeffs) == sympy_coeffs((1 + t) ** sp.Rational(1, 3), order)


@settings(max_examples=60, deadline=None)
@given(series(unit=True))
def test_inverse(a):
    one = a * a.inverse()
    assert one.coeffs[0] == 1 and all(c == 0 for c in one.coeffs[1:])


@settings(max_examples=60, deadline=None)
@given(series(unit=True), st.integers(2, 5))
def test_fractional_power_roundtrip(a, m):
    r = a.power(F(1, m))
    assert r ** m == a
    assert list(r.coeffs) == sympy_coeffs(as_expr(a) ** sp.Rational(1, m), a.order)


@settings(max_examples=60, deadline=None)
@given(series(valuation=2), st.integers(1, 3))
def test_reversion_is_compositional_inverse(tail, k):
    s = Series.variable(tail.order) + tail
    r = s.reversion()
    ident = s.compose(r)
    assert ident.order >= 1
    assert list(ident.coeffs) == [F(0), F(1)] + [F(0)] * (ident.order - 1)
    assert list(r.compose(s).coeffs)[:2] == [F(0), F(1)]


@settings(max_examples=60, deadline=None)
@given(series(), series(valuation=1), st.lists(fr, min_size=3, max_size=3),
       st.lists(fr, min_size=3, max_size=3))
def test_compose_order_is_sound(a, b, ta, tb):
    """Coefficients inside the reported order do not depend on the unknown tails."""
    assume(not b.is_zero())
    c1 = a.compose(b)
    c2 = perturb(a, ta).compose(perturb(b, tb))
    assert c2.order >= c1.order
    assert c1.coeffs == c2.coeffs[: c1.order + 1]
    expr = as_expr(a).subs(t, as_expr(b))
    assert list(c1.coeffs) == [F(str(sp.expand(expr).coeff(t, j))) for j in range(c1.order + 1)]


@settings(max_examples=60, deadline=None)
@given(series(valuation=1), series(valuation=2), st.lists(fr, min_size=3, max_size=3),
       st.lists(fr, min_size=3, max_size=3))
def test_product_order_is_sound(a, b, ta, tb):
    p1 = a * b
    p2 = perturb(a, ta) * perturb(b, tb)
    assert p1.coeffs == p2.coeffs[: p1.order + 1]
    if not a.is_zero() and not b.is_zero():
        # a nonzero valuation buys extra known coefficients
        assert p1.order == min(a.order + b.valuation(), b.order + a.valuation())


def test_compose_gains_order_from_valuation():
    a = Series([1, 2, 3], 2)
    # a(t^2) is known through t^5 once b is known that far
    c = a.compose(Series([0, 0, 1], 6))
    assert c.order == 5
    assert list(c.coeffs) == [1, 0, 2, 0, 3, 0]
    # with b only known through t^4, 2*b already carries an unknown t^5
    assert a.compose(Series([0, 0, 1], 4)).order == 4


def test_shift_and_substitute():
    s = Series([0, 0, 3, 4], 3)
    assert s.shift_down(2) == Series([3, 4], 1)
    assert s.shift_down(2).shift_up(2) == s
    with pytest.raises(ValueError):
        s.shift_down(3)
    sub = Series([1, 2], 1).substitute_power(2)
    assert sub == Series([1, 0, 2, 0], 3)
    assert sub.contract_power(2) == Series([1, 2], 1)
    with pytest.raises(ValueError):
        Series([1, 1], 1).contract_power(2)


def test_derivative_integral():
    s = Series([F(1, 2), 3, 0, 5], 3)
    assert s.derivative().integral() == Series([0, 3, 0, 5], 3)
    assert s.integral().derivative() == s


def test_parametric_coefficients():
    sig = Poly.var(0, 1)
    s = Series([sig, sig * sig + 1], 1)
    assert s.at_sigma(F(2)) == Series([2, 5], 1)
    assert s.evaluate(0.5, sigma=3) == pytest.approx(3 + 0.5 * 10)
    inv = Series([1, sig], 3).inverse()
    assert inv.at_sigma(F(1, 2)) == Series([1, F(-1, 2), F(1, 4), F(-1, 8)], 3)


def test_errors():
    with pytest.raises(ZeroDivisionError):
        Series([0, 1], 2).inverse()
    with pytest.raises(ValueError):
        Series([2, 1], 2).power(F(1, 2))
    with pytest.raises(ValueError):
        Series([0, 2], 2).reversion()
    with pytest.raises(ValueError):
        Series([1, 1], 2).compose(Series([1, 1], 2))
    with pytest.raises(IndexError):
        Series([1], 0)[1]


def test_vector_series():
    v = VecSeries.from_coeffs([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 4)
    assert v.order == 4 and v.dim == 3
    assert v.coeff(1) == (0, 1, 0)
    n = v.dot(v)
    assert n == Series([1, 0, 1, 0, 1], 4)
    assert v.dot_const((0, 0, 2)) == Series([0, 0, 2, 0, 0], 4)
    w = v * Series.variable(4)
    assert w.valuation() == 1
    assert v.derivative().coeff(0) == (0, 1, 0)
    assert v.evaluate(2.0) == (1.0, 2.0, 4.0)
    assert cross((1, 0, 0), (0, 1, 0)) == (0, 0, 1)
    assert dot((1, 2, 3), (4, 5, 6)) == 32
