"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is a sparse map from exponent tuples to nonzero
:class:`~fractions.Fraction` coefficients. Everything here is exact; floats
only appear when a polynomial is evaluated at a float point, or when a
Coxeter polynomial is requested at an angle whose sine/cosine is irrational
(such polynomials carry ``exact=False``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class Poly:
    """Immutable sparse polynomial in ``dim`` variables with rational coefficients."""

    __slots__ = ("dim", "_terms", "exact", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponent, object] | None = None,
                 exact: bool = True):
        if dim < 1:
            raise ValueError("dim must be positive")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for dim {dim}")
            c = _as_fraction(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.dim = dim
        self._terms = clean
        self.exact = exact
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict[Exponent, Fraction], exact: bool = True) -> "Poly":
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        p.dim = dim
        p._terms = terms
        p.exact = exact
        p._hash = None
        return p

    @classmethod
    def const(cls, c, dim: int) -> "Poly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def var(cls, i: int, dim: int) -> "Poly":
        exp = [0] * dim
        exp[i] = 1
        return cls._raw(dim, {tuple(exp): Fraction(1)})

    @classmethod
    def variables(cls, dim: int) -> tuple["Poly", ...]:
        return tuple(cls.var(i, dim) for i in range(dim))

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls._raw(dim, {})

    # -- structure -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    @property
    def min_degree(self) -> int:
        if not self._terms:
            return -1
        return min(sum(e) for e in self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.dim, Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return Poly.const(other, self.dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.dim, out, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.dim, {e: -c for e, c in self._terms.items()}, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            c = Fraction(other)
            if not c:
                return Poly.zero(self.dim)
            return Poly._raw(self.dim, {e: v * c for e, v in self._terms.items()}, self.exact)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        out = {e: c for e, c in out.items() if c}
        return Poly._raw(self.dim, out, self.exact and other.exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1, self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, Rational)):
            c = Fraction(other)
            if not c:
                return not self._terms
            return self._terms == {(0,) * self.dim: c}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution ----------------------------------------

    def derivative(self, i: int) -> "Poly":
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly._raw(self.dim, out, self.exact)

    def compose(self, polys: Sequence["Poly"]) -> "Poly":
        """Substitute ``x_i -> polys[i]``; all replacements share one dimension."""
        if len(polys) != self.dim:
            raise ValueError("need one replacement per variable")
        target = polys[0].dim
        cache: dict[tuple[int, int], Poly] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = polys[i] ** k
            return cache[key]

        result = Poly.zero(target)
        for e, c in self._terms.items():
            term = Poly.const(c, target)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        result.exact = self.exact and all(p.exact for p in polys)
        return result

    def evaluate(self, x: Sequence) -> Fraction | float:
        return evaluate(self, x)

    def evaluate_array(self, points) -> np.ndarray:
        """Float evaluation at each row of an ``(n, dim)`` array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.dim:
            raise ValueError(f"points have dimension {pts.shape[1]}, polynomial has {self.dim}")
        out = np.zeros(pts.shape[0])
        if not self._terms:
            return out
        maxdeg = [max(e[i] for e in self._terms) for i in range(self.dim)]
        powers = []
        for i in range(self.dim):
            col = [np.ones(pts.shape[0])]
            for _ in range(maxdeg[i]):
                col.append(col[-1] * pts[:, i])
            powers.append(col)
        for e, c in self._terms.items():
            term = np.full(pts.shape[0], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            out += term
        return out

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (list, tuple, np.ndarray)):
            x = x[0]
        return evaluate(self, x)

    # -- presentation ----------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self._terms.items(), key=lambda it: (-sum(it[0]), tuple(-k for k in it[0])))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {self})"

    def to_json(self) -> dict:
        doc = {
            "dim": self.dim,
            "terms": [
                {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
                for e, c in self.sorted_terms()
            ],
        }
        if not self.exact:
            doc["exact"] = False
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "Poly":
        dim = int(doc["dim"])
        terms: dict[Exponent, Fraction] = {}
        for i, t in enumerate(doc["terms"]):
            exp = tuple(int(k) for k in t["exp"])
            c = Fraction(int(str(t["num"])), int(str(t.get("den", "1"))))
            if exp in terms:
                raise ValueError(f"terms[{i}]: duplicate exponent {list(exp)}")
            terms[exp] = c
        return cls(dim, terms, exact=bool(doc.get("exact", True)))


@dataclass(frozen=True)
class LinearForm:
    """``A(x) = sum_i coeffs[i] * x_i`` with at least one nonzero coefficient."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(_as_fraction(c) for c in self.coeffs)
        if not any(coeffs):
            raise ValueError("linear form must have a nonzero coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def normalized(self) -> "LinearForm":
        lead = next(c for c in self.coeffs if c)
        return LinearForm(tuple(c / lead for c in self.coeffs))

    def is_proportional(self, other: "LinearForm") -> bool:
        return self.normalized() == other.normalized()

    def as_poly(self) -> Poly:
        d = self.dim
        return Poly(d, {tuple(int(i == j) for j in range(d)): c for i, c in enumerate(self.coeffs)})

    def __str__(self) -> str:
        return str(self.as_poly())


# ---------------------------------------------------------------------------
# basic operations


def laplacian(p: Poly) -> Poly:
    out: dict[Exponent, Fraction] = {}
    for e, c in p.items():
        for i, k in enumerate(e):
            if k >= 2:
                ne = list(e)
                ne[i] -= 2
                ne = tuple(ne)
                out[ne] = out.get(ne, 0) + c * k * (k - 1)
    return Poly._raw(p.dim, {e: c for e, c in out.items() if c}, p.exact)


def homogeneous_parts(p: Poly) -> list[tuple[int, Poly]]:
    """Nonzero homogeneous components of ``p`` in ascending degree."""
    buckets: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in p.items():
        buckets.setdefault(sum(e), {})[e] = c
    return [(d, Poly._raw(p.dim, buckets[d], p.exact)) for d in sorted(buckets)]


def is_harmonic(p: Poly) -> bool:
    return laplacian(p).is_zero()


def evaluate(p: Poly, x: Sequence) -> Fraction | float:
    """Evaluate ``p`` at ``x``; exact when every coordinate is rational."""
    if len(x) != p.dim:
        raise ValueError(f"point has dimension {len(x)}, polynomial has {p.dim}")
    exact = all(isinstance(v, (int, Fraction, Rational)) and not isinstance(v, bool) for v in x)
    if exact:
        xs = [Fraction(v) for v in x]
        total = Fraction(0)
        for e, c in p.items():
            term = c
            for v, k in zip(xs, e):
                if k:
                    term *= v ** k
            total += term
        return total
    xs = [float(v) for v in x]
    return math.fsum(
        float(c) * math.prod(v ** k for v, k in zip(xs, e) if k) for e, c in p.items()
    )


# ---------------------------------------------------------------------------
# Coxeter polynomials and solid harmonics

_EXACT_COS = {
    Fraction(0): Fraction(1), Fraction(1, 3): Fraction(1, 2), Fraction(1, 2): Fraction(0),
    Fraction(2, 3): Fraction(-1, 2), Fraction(1): Fraction(-1), Fraction(4, 3): Fraction(-1, 2),
    Fraction(3, 2): Fraction(0), Fraction(5, 3): Fraction(1, 2),
}
_EXACT_SIN = {
    Fraction(0): Fraction(0), Fraction(1, 6): Fraction(1, 2), Fraction(1, 2): Fraction(1),
    Fraction(5, 6): Fraction(1, 2), Fraction(1): Fraction(0), Fraction(7, 6): Fraction(-1, 2),
    Fraction(3, 2): Fraction(-1), Fraction(11, 6): Fraction(-1, 2),
}


def trig_of_pi_multiple(phi) -> tuple[Fraction | float, Fraction | float, bool]:
    """``(cos(q*pi), sin(q*pi), exact)`` for a rational ``q`` given as ``(num, den)``."""
    q = Fraction(*phi) if isinstance(phi, tuple) else Fraction(phi)
    r = q % 2
    c = _EXACT_COS.get(r)
    s = _EXACT_SIN.get(r)
    if c is not None and s is not None:
        return c, s, True
    angle = math.pi * float(r)
    return (c if c is not None else math.cos(angle)), (s if s is not None else math.sin(angle)), False


def _binary_power_parts(n: int) -> tuple[Poly, Poly]:
    """Real and imaginary parts of ``(x1 + i x2)^n``."""
    re: dict[Exponent, Fraction] = {}
    im: dict[Exponent, Fraction] = {}
    for k in range(n + 1):
        c = Fraction(math.comb(n, k))
        exp = (n - k, k)
        # i^k cycles 1, i, -1, -i
        if k % 4 == 0:
            re[exp] = c
        elif k % 4 == 1:
            im[exp] = c
        elif k % 4 == 2:
            re[exp] = -c
        else:
            im[exp] = -c
    return Poly(2, re), Poly(2, im)


def coxeter_poly(n: int, phi=(0, 1)) -> Poly:
    """``Im(e^{i phi} (x1 + i x2)^n)`` with ``phi = num/den * pi``.

    The zero set is the system of ``n`` lines through the origin rotated by
    ``phi``. Coefficients are exact when ``phi`` is a multiple of ``pi/2``;
    otherwise they are binary-exact images of floats and ``exact`` is False.
    """
    if n < 1:
        raise ValueError("N must be at least 1")
    c, s, exact = trig_of_pi_multiple(phi)
    re, im = _binary_power_parts(n)
    if exact:
        return im * c + re * s
    cf = Fraction(float(c)) if not isinstance(c, Fraction) else c
    sf = Fraction(float(s)) if not isinstance(s, Fraction) else s
    p = im * cf + re * sf
    p.exact = False
    return p


def solid_harmonic_basis(dim: int, degree: int) -> list[Poly]:
    """A basis of harmonic homogeneous polynomials of the given degree."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if dim == 2:
        if degree == 0:
            return [Poly.const(1, 2)]
        re, im = _binary_power_parts(degree)
        return [re, im]
    if dim != 3:
        raise ValueError("dim must be 2 or 3")
    # Complete each monomial x1^a x2^b x3^c (c in {0, 1}) to a harmonic
    # polynomial by adding x3-powers: h = sum_k (-1)^k L^k(m) x3^(c+2k) c!/(c+2k)!,
    # where L is the Laplacian in (x1, x2).
    basis = []
    for c in (0, 1):
        for a in range(degree - c, -1, -1):
            b = degree - c - a
            g = Poly(3, {(a, b, 0): 1})
            h = Poly.zero(3)
            k = 0
            while not g.is_zero():
                scale = Fraction((-1) ** k * math.factorial(c), math.factorial(c + 2 * k))
                shifted = {(e[0], e[1], e[2] + c + 2 * k): v * scale for e, v in g.items()}
                h = h + Poly(3, shifted)
                g = laplacian(g)
                k += 1
            basis.append(h)
    return basis


# ---------------------------------------------------------------------------
# square linear divisors


def _univariate(p: Poly) -> list[Fraction]:
    """Coefficient list (ascending) of a 1-variable polynomial."""
    if p.is_zero():
        return []
    out = [Fraction(0)] * (p.degree + 1)
    for (k,), c in p.items():
        out[k] = c
    return out


def _trim(a: list[Fraction]) -> list[Fraction]:
    while a and not a[-1]:
        a = a[:-1]
    return a


def _udivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = _trim(a)
    return q, a


def _ugcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _ueval(a: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """Distinct rational roots of a univariate polynomial (ascending coefficients).

    Candidates come from floating-point roots of the squarefree part and are
    then confirmed exactly, so every returned value is a true root.
    """
    a = _trim([Fraction(c) for c in coeffs])
    if len(a) <= 1:
        return []
    roots: list[Fraction] = []
    while a and not a[0]:
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
        a = a[1:]
    if len(a) <= 1:
        return roots
    deriv = [c * i for i, c in enumerate(a)][1:]
    g = _ugcd(a, deriv)
    sqfree, _ = _udivmod(a, g) if len(g) > 1 else (a, [])
    den = math.lcm(*(c.denominator for c in sqfree))
    ints = [int(c * den) for c in sqfree]
    content = math.gcd(*ints)
    ints = [c // content for c in ints]
    lead = abs(ints[-1])
    if len(ints) == 2:
        cands = [Fraction(-ints[0], ints[1])]
    else:
        cands = []
        for z in np.roots([float(c) for c in reversed(ints)]):
            if abs(z.imag) > 1e-6 * (1 + abs(z.real)):
                continue
            x = z.real
            cands.append(Fraction(round(x * lead), lead))
            cands.append(Fraction(x).limit_denominator(max(lead, 1)))
    for c in cands:
        if c not in roots and _ueval(a, c) == 0:
            roots.append(c)
    return sorted(roots)


def divide_by_linear(h: Poly, form: LinearForm) -> Poly | None:
    """Exact quotient ``h / A`` or None if the linear form does not divide ``h``."""
    form = form.normalized()
    d = h.dim
    i = next(k for k, c in enumerate(form.coeffs) if c)
    # A = x_i + r with r free of x_i; divide h (as a polynomial in x_i) by x_i + r.
    r = Poly(d, {tuple(int(j == k) for j in range(d)): c
                 for k, c in enumerate(form.coeffs) if k != i and c})
    by_power: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in h.items():
        ne = list(e)
        ne[i] = 0
        by_power.setdefault(e[i], {})[tuple(ne)] = c
    if not by_power:
        return Poly.zero(d)
    n = max(by_power)
    coeff = [Poly._raw(d, by_power.get(k, {})) for k in range(n + 1)]
    if n == 0:
        return Poly.zero(d) if coeff[0].is_zero() else None
    q = [Poly.zero(d)] * n
    q[n - 1] = coeff[n]
    for k in range(n - 1, 0, -1):
        q[k - 1] = coeff[k] - r * q[k]
    if not (coeff[0] - r * q[0]).is_zero():
        return None
    xi = Poly.var(i, d)
    quotient = Poly.zero(d)
    for k, qk in enumerate(q):
        quotient = quotient + qk * xi ** k
    return quotient


def _solve_last_coefficient(h: Poly, alpha: tuple[Fraction, ...]) -> list[Fraction]:
    """Values ``a`` for which ``alpha . x' + a x_d`` could divide ``h``."""
    d = h.dim
    i = next(k for k, c in enumerate(alpha) if c)
    a = Poly.var(0, 1)
    for trial in range(1, 12):
        subs: list[Poly | None] = [None] * d
        offset = Fraction(0)
        for j in range(d - 1):
            if j != i:
                val = Fraction((trial * (j + 3)) % 7 - 3 + trial)
                subs[j] = Poly.const(val, 1)
                offset += alpha[j] * val
        subs[d - 1] = Poly.const(1, 1)
        subs[i] = (a + offset) * Fraction(-1, alpha[i])
        p = h.compose(subs)
        if not p.is_zero():
            return rational_roots(_univariate(p))
    return []


def _linear_factor_set(h: Poly) -> set[tuple[Fraction, ...]]:
    d = h.dim
    if h.degree <= 0:
        return set()
    if d == 1:
        return {(Fraction(1),)}
    found: set[tuple[Fraction, ...]] = set()
    k = min(e[-1] for e in h._terms)
    if k:
        found.add(tuple(Fraction(int(j == d - 1)) for j in range(d)))
        h = Poly._raw(d, {e[:-1] + (e[-1] - k,): c for e, c in h.items()})
        if h.degree <= 0:
            return found
    g = Poly._raw(d - 1, {e[:-1]: c for e, c in h.items() if e[-1] == 0})
    for alpha in _linear_factor_set(g):
        for a in _solve_last_coefficient(h, alpha):
            form = LinearForm(alpha + (a,))
            if divide_by_linear(h, form) is not None:
                found.add(form.coeffs)
    return found


def linear_factors(h: Poly) -> list[LinearForm]:
    """All rational linear forms (normalized, distinct) dividing homogeneous ``h``."""
    _check_homogeneous_nonzero(h)
    return [LinearForm(c) for c in sorted(_linear_factor_set(h))]


def _check_homogeneous_nonzero(h: Poly) -> None:
    if h.is_zero():
        raise ValueError("polynomial is zero")
    if not h.is_homogeneous():
        raise ValueError("polynomial is not homogeneous")


def divisible_by_square_linear(h: Poly) -> LinearForm | None:
    """Smallest normalized linear form ``A`` with ``A^2 | h``, or None."""
    _check_homogeneous_nonzero(h)
    hits = []
    for form in linear_factors(h):
        q = divide_by_linear(h, form)
        if q is not None and divide_by_linear(q, form) is not None:
            hits.append(form)
    return min(hits, key=lambda f: f.coeffs) if hits else None


def random_poly(rng, dim: int, degree: int, n_terms: int = 4, bound: int = 5) -> Poly:
    """Random rational polynomial, used by property tests and demos."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]
    terms = {}
    for _ in range(n_terms):
        e = exps[rng.integers(len(exps))]
        terms[e] = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))
    return Poly(dim, terms)


def poly_from_iterable(dim: int, terms: Iterable[tuple[Sequence[int], object]]) -> Poly:
    return Poly(dim, {tuple(e): c for e, c in terms})
