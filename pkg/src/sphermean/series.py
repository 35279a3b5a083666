"""Truncated power series with explicit order bookkeeping.

A :class:`Series` stores the coefficients of ``t^0 .. t^order``; everything
beyond ``order`` is unknown. Coefficients are either rationals or
one-variable :class:`~sphermean.polynomials.Poly` objects (a polynomial ring
in an auxiliary parameter). Each operation reports the largest order through
which its result is still exact, so "identically zero through order M"
statements never depend on truncation artifacts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .polynomials import Poly

ZERO = Fraction(0)
ONE = Fraction(1)


def _scalar(c) -> Fraction:
    """The rational value of a ring element that must be a constant."""
    if isinstance(c, Poly):
        if not c.is_constant():
            raise ZeroDivisionError("coefficient is not a unit of the ring")
        return c.constant_term()
    return Fraction(c)


def _coerce(c):
    if isinstance(c, (Poly, Fraction)):
        return c
    return Fraction(c)


def _eval_coeff(c, sigma):
    if isinstance(c, Poly):
        if sigma is None:
            raise ValueError("coefficient depends on a parameter; pass sigma")
        return c.evaluate([sigma])
    return c


class Series:
    """Power series ``sum_j c_j t^j`` known through ``t^order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [_coerce(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < -1:
            raise ValueError("order must be at least -1")
        cs = cs[: order + 1]
        cs += [ZERO] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def const(cls, c, order: int) -> "Series":
        return cls([c], order)

    @classmethod
    def variable(cls, order: int) -> "Series":
        return cls([ZERO, ONE], order)

    @classmethod
    def monomial(cls, c, k: int, order: int) -> "Series":
        return cls([ZERO] * k + [c], order)

    def __getitem__(self, j: int):
        if j > self.order:
            raise IndexError(f"coefficient t^{j} beyond truncation order {self.order}")
        return self.coeffs[j]

    def __len__(self) -> int:
        return self.order + 1

    def __repr__(self) -> str:
        terms = [f"({c})*t^{j}" for j, c in enumerate(self.coeffs) if c != 0]
        return f"Series({' + '.join(terms) or '0'} + O(t^{self.order + 1}))"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None

    # -- structure -------------------------------------------------------

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; ``order + 1`` if none is known."""
        for j, c in enumerate(self.coeffs):
            if c != 0:
                return j
        return self.order + 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def truncate(self, order: int) -> "Series":
        return Series(self.coeffs, min(order, self.order))

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def odd_indices(self) -> list[int]:
        return [j for j in range(1, self.order + 1, 2) if self.coeffs[j] != 0]

    def map(self, fn: Callable) -> "Series":
        return Series([fn(c) for c in self.coeffs], self.order)

    def at_sigma(self, sigma) -> "Series":
        """Specialize parameter-valued coefficients at a rational ``sigma``."""
        return self.map(lambda c: _eval_coeff(c, sigma))

    # -- arithmetic ------------------------------------------------------

    def _lift(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return Series.const(other, self.order)

    def __add__(self, other):
        other = self._lift(other)
        order = min(self.order, other.order)
        return Series([a + b for a, b in zip(self.coeffs[: order + 1], other.coeffs)], order)

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Series):
            other = _coerce(other)
            return Series([c * other for c in self.coeffs], self.order)
        va, vb = self.valuation(), other.valuation()
        order = min(self.order + vb, other.order + va)
        out = [ZERO] * (order + 1)
        for i in range(va, min(self.order, order) + 1):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(vb, min(other.order, order - i) + 1):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return Series(out, order)

    __rmul__ = __mul__

    def scale(self, c) -> "Series":
        return self * c

    def __pow__(self, n: int) -> "Series":
        if n < 0:
            return self.inverse() ** (-n)
        result = Series.const(ONE, self.order + self.valuation() * n)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "Series":
        """Multiplicative inverse; the constant term must be a nonzero constant."""
        a0 = _scalar(self.coeffs[0]) if self.order >= 0 else ZERO
        if a0 == 0:
            raise ZeroDivisionError("series has no constant term to invert")
        inv0 = 1 / a0
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = ZERO
            for k in range(1, n + 1):
                if self.coeffs[k] != 0:
                    acc = acc + self.coeffs[k] * out[n - k]
            out.append(-acc * inv0)
        return Series(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        return self * (ONE / _scalar(other))

    def power(self, exponent: Fraction) -> "Series":
        """``self ** exponent`` for a unit series whose constant term is 1."""
        exponent = Fraction(exponent)
        if _scalar(self.coeffs[0]) != 1:
            raise ValueError("fractional powers need constant term 1")
        # y = a^p satisfies a y' = p a' y; solve coefficient by coefficient.
        a = self.coeffs
        y = [ONE]
        for n in range(1, self.order + 1):
            acc = ZERO
            for k in range(1, n + 1):
                if a[k] != 0:
                    acc = acc + a[k] * y[n - k] * (exponent * k - (n - k))
            y.append(acc / n)
        return Series(y, self.order)

    def shift_down(self, k: int) -> "Series":
        """Divide by ``t^k``; requires the first ``k`` coefficients to vanish."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError(f"series is not divisible by t^{k}")
        return Series(self.coeffs[k:], self.order - k)

    def shift_up(self, k: int) -> "Series":
        return Series([ZERO] * k + list(self.coeffs), self.order + k)

    def derivative(self) -> "Series":
        return Series([c * j for j, c in enumerate(self.coeffs)][1:], self.order - 1)

    def integral(self) -> "Series":
        """Antiderivative vanishing at 0."""
        return Series([ZERO] + [c / (j + 1) for j, c in enumerate(self.coeffs)], self.order + 1)

    def compose(self, inner: "Series") -> "Series":
        """``self(inner(t))`` for an inner series without constant term."""
        if inner.coeffs and inner.order >= 0 and inner.coeffs[0] != 0:
            raise ValueError("inner series must vanish at 0")
        w = inner.valuation()
        v = self.valuation()
        order = (self.order + 1) * w - 1
        if v <= self.order:
            order = min(order, inner.order + (max(v, 1) - 1) * w)
        order = max(order, -1)
        if order < 0:
            return Series([], -1)
        inner_t = inner.truncate(order)
        out = Series.const(self.coeffs[0] if self.order >= 0 else ZERO, order)
        power = None
        for k in range(1, self.order + 1):
            power = inner_t if power is None else (power * inner_t).truncate(order)
            if self.coeffs[k] != 0:
                out = out + power * self.coeffs[k]
        return out

    def substitute_power(self, k: int) -> "Series":
        """``self(t^k)``."""
        out = [ZERO] * (k * self.order + 1)
        for j, c in enumerate(self.coeffs):
            out[k * j] = c
        return Series(out, k * (self.order + 1) - 1)

    def contract_power(self, k: int) -> "Series":
        """Inverse of :meth:`substitute_power`: ``g`` with ``self(t) = g(t^k)``."""
        if any(c != 0 for j, c in enumerate(self.coeffs) if j % k):
            raise ValueError(f"series is not a series in t^{k}")
        return Series(self.coeffs[::k], self.order // k)

    def reversion(self) -> "Series":
        """Compositional inverse of a series ``t + O(t^2)``."""
        if self.order < 1 or self.coeffs[0] != 0 or _scalar(self.coeffs[1]) != 1:
            raise ValueError("reversion needs a series of the form t + O(t^2)")
        t = Series.variable(self.order)
        T = t
        # T = t - (S(T) - T); each pass fixes one more coefficient
        for _ in range(self.order):
            T = (t - (self.compose(T) - T)).truncate(self.order)
        return T

    def evaluate(self, t: float, sigma=None) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + float(_eval_coeff(c, sigma))
        return acc


class VecSeries:
    """A series of 3-vectors, stored as one :class:`Series` per coordinate."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Series]):
        comps = list(components)
        order = min(c.order for c in comps)
        self.components = tuple(c.truncate(order) for c in comps)

    @classmethod
    def from_coeffs(cls, vectors: Sequence[Sequence], order: int | None = None) -> "VecSeries":
        vectors = [tuple(_coerce(x) for x in v) for v in vectors]
        dim = len(vectors[0]) if vectors else 3
        if order is None:
            order = len(vectors) - 1
        return cls([Series([v[i] for v in vectors], order) for i in range(dim)])

    @classmethod
    def const(cls, vector: Sequence, order: int) -> "VecSeries":
        return cls.from_coeffs([vector], order)

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def coeffs(self) -> list[tuple]:
        return [tuple(c.coeffs[j] for c in self.components) for j in range(self.order + 1)]

    def coeff(self, j: int) -> tuple:
        return tuple(c[j] for c in self.components)

    def __repr__(self) -> str:
        return f"VecSeries(order={self.order}, coeffs={self.coeffs})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, VecSeries):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def valuation(self) -> int:
        return min(c.valuation() for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def truncate(self, order: int) -> "VecSeries":
        return VecSeries([c.truncate(order) for c in self.components])

    def map(self, fn: Callable[[Series], Series]) -> "VecSeries":
        return VecSeries([fn(c) for c in self.components])

    def __add__(self, other: "VecSeries") -> "VecSeries":
        return VecSeries([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VecSeries") -> "VecSeries":
        return VecSeries([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VecSeries":
        return self.map(lambda c: -c)

    def __mul__(self, other) -> "VecSeries":
        """Multiply by a scalar series or a ring constant."""
        return VecSeries([c * other for c in self.components])

    __rmul__ = __mul__

    def dot(self, other: "VecSeries") -> Series:
        total = self.components[0] * other.components[0]
        for a, b in zip(self.components[1:], other.components[1:]):
            total = total + a * b
        return total

    def dot_const(self, vector: Sequence) -> Series:
        total = self.components[0] * _coerce(vector[0])
        for a, b in zip(self.components[1:], vector[1:]):
            total = total + a * _coerce(b)
        return total

    def derivative(self) -> "VecSeries":
        return self.map(Series.derivative)

    def compose(self, inner: Series) -> "VecSeries":
        return self.map(lambda c: c.compose(inner))

    def shift_down(self, k: int) -> "VecSeries":
        return self.map(lambda c: c.shift_down(k))

    def evaluate(self, t: float, sigma=None) -> tuple[float, ...]:
        return tuple(c.evaluate(t, sigma) for c in self.components)


def cross(a: Sequence, b: Sequence) -> tuple:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), ZERO)
