from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from sphermean.polynomials import Poly

X = sp.symbols("x1:4")


def to_sympy(p: Poly):
    xs = X[: p.dim]
    return sum((sp.Rational(c.numerator, c.denominator) * sp.prod([x**k for x, k in zip(xs, e)])
                for e, c in p.items()), sp.Integer(0))


def from_sympy(expr, dim: int) -> Poly:
    poly = sp.Poly(sp.expand(expr), *X[:dim])
    return Poly(dim, {e: Fraction(int(c.p), int(c.q)) for e, c in poly.terms()})


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
