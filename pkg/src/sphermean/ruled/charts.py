"""Ruled-surface charts ``(t, lam) -> u(t) + lam e(t)`` as truncated series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ..series import Series, VecSeries

F = Fraction


@dataclass(frozen=True, eq=False)
class RuledChart:
    """Base curve ``u`` and unit direction field ``e``, both known through ``order``."""

    u: VecSeries
    e: VecSeries

    def __post_init__(self):
        if self.u.dim != 3 or self.e.dim != 3:
            raise ValueError("charts live in R^3")
        order = min(self.u.order, self.e.order)
        object.__setattr__(self, "u", self.u.truncate(order))
        object.__setattr__(self, "e", self.e.truncate(order))

    @property
    def order(self) -> int:
        return self.u.order

    def with_order(self, order: int) -> "RuledChart":
        return RuledChart(self.u.truncate(order), self.e.truncate(order))

    def is_unit(self) -> bool:
        """``<e, e> = 1`` through the truncation order, exactly."""
        n = self.e.dot(self.e)
        return n.coeffs[0] == 1 and all(c == 0 for c in n.coeffs[1:])

    def line(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Point and unit direction of the ruling line at ``t`` (polynomial evaluation)."""
        p = np.array(self.u.evaluate(t))
        d = np.array(self.e.evaluate(t))
        return p, d / np.linalg.norm(d)

    def point(self, t: float, lam: float) -> np.ndarray:
        p, d = self.line(t)
        return p + lam * d

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "u": [[str(c) for c in v] for v in self.u.coeffs],
            "e": [[str(c) for c in v] for v in self.e.coeffs],
        }

    @classmethod
    def from_json(cls, doc: Mapping, normalize: bool = True) -> "RuledChart":
        order = int(doc["order"])
        u = VecSeries.from_coeffs([[Fraction(str(c)) for c in v] for v in doc["u"]], order)
        e = VecSeries.from_coeffs([[Fraction(str(c)) for c in v] for v in doc["e"]], order)
        return make_chart(u, e) if normalize else cls(u, e)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def normalize_direction(e: VecSeries) -> VecSeries:
    """``e / |e|`` as an exact series.

    The expansion needs ``|e(0)|`` to be rational; otherwise the caller must
    supply a pre-normalized direction.
    """
    n2 = e.dot(e)
    if n2.coeffs[0] == 0:
        raise ValueError("direction vanishes at the base parameter")
    root = _rational_sqrt(n2.coeffs[0])
    if root is None:
        raise ValueError("|e(0)| is irrational; supply a unit direction series")
    inv = (n2 * (1 / n2.coeffs[0])).power(Fraction(-1, 2)) * (1 / root)
    return e * inv


def make_chart(u: VecSeries, e: VecSeries) -> RuledChart:
    """Chart with ``e`` replaced by its exact normalization when needed."""
    chart = RuledChart(u, e)
    if chart.is_unit():
        return chart
    return RuledChart(chart.u, normalize_direction(chart.e))


def taylor_shift(x: VecSeries, t0: Fraction) -> VecSeries:
    """Re-expand the truncated polynomial of ``x`` around ``t0``."""
    t0 = Fraction(t0)
    if t0 == 0:
        return x
    comps = []
    for comp in x.components:
        n = comp.order
        out = [Fraction(0)] * (n + 1)
        for j, c in enumerate(comp.coeffs):
            if c == 0:
                continue
            for k in range(j + 1):
                out[k] += c * math.comb(j, k) * t0 ** (j - k)
        comps.append(Series(out, n))
    return VecSeries(comps)


def recenter(chart: RuledChart, t0) -> RuledChart:
    """Chart in the local parameter ``t - t0``, treating the data as polynomials."""
    return RuledChart(taylor_shift(chart.u, t0), taylor_shift(chart.e, t0))


def orthogonalize_chart(chart: RuledChart, t0=0) -> RuledChart:
    """Slide the base curve along the rulings so that ``<u', e> = 0``.

    Uses ``lam(t) = -int_{t0}^{t} <u', e>``; the result lies on the same
    lines and is orthogonal through ``order - 1`` when ``e`` is a unit field.
    """
    g = chart.u.derivative().dot(chart.e)
    lam = -g.integral()
    t0 = Fraction(t0)
    if t0 != 0:
        lam = lam - sum(c * t0**j for j, c in enumerate(lam.coeffs))
    return RuledChart(chart.u + chart.e * lam, chart.e)


# ---------------------------------------------------------------------------
# fixtures


def _vec(order: int, *cols: Sequence) -> VecSeries:
    return VecSeries([Series(c, order) for c in cols])


def rational_circle(order: int) -> tuple[Series, Series]:
    """``((1-t^2)/(1+t^2), 2t/(1+t^2))`` as exact series."""
    inv = Series([1, 0, 1], order).inverse()
    return Series([1, 0, -1], order) * inv, Series([0, 2], order) * inv


def whitney_chart(order: int = 8) -> RuledChart:
    """``u = (t^2, 0, 0)``, ``e = (0, 1, t)/sqrt(1 + t^2)``: the Whitney umbrella."""
    return make_chart(_vec(order, [0, 0, 1], [0], [0]), _vec(order, [0], [1], [0, 1]))


def circular_cone_chart(order: int = 8) -> RuledChart:
    """Cone with vertex at the origin and half-angle ``arctan(3/4)``; ``u = 5 e``."""
    c, s = rational_circle(order)
    e = VecSeries([c * F(3, 5), s * F(3, 5), Series([F(4, 5)], order)])
    return RuledChart(e * 5, e)


def plane_chart(order: int = 8) -> RuledChart:
    """``u = (t^2, 0, 0)``, ``e = (0, 1, 0)``: a piece of the plane ``x3 = 0``."""
    return RuledChart(_vec(order, [0, 0, 1], [0], [0]), _vec(order, [0], [1], [0]))


def concurrent_plane_chart(order: int = 8) -> RuledChart:
    """A pencil of lines through the origin inside the plane ``x3 = 0``."""
    c, s = rational_circle(order)
    return RuledChart(_vec(order, [0], [0], [0]), VecSeries([c, s, Series([0], order)]))


def cylinder_chart(order: int = 8) -> RuledChart:
    """Truncated ``u = (cos t, sin t, 0)``, ``e = (0, 0, 1)``."""
    cos = [F((-1) ** (j // 2), math.factorial(j)) if j % 2 == 0 else 0 for j in range(order + 1)]
    sin = [F((-1) ** (j // 2), math.factorial(j)) if j % 2 else 0 for j in range(order + 1)]
    return RuledChart(_vec(order, cos, sin, [0]), _vec(order, [0], [0], [1]))


def odd_power_chart(order: int = 8, m: int = 3, coeff: Fraction = F(1)) -> RuledChart:
    """``u = (t^m, 0, coeff t^(m+1))``, ``e = (0, 1, 0)``; smooth point with odd ``m``."""
    return RuledChart(
        _vec(order, [0] * m + [1], [0], [0] * (m + 1) + [coeff]), _vec(order, [0], [1], [0])
    )


def tilted_odd_chart(order: int = 8, m: int = 3) -> RuledChart:
    """``u = (t^m, 0, 0)``, ``e = (0, 1, t)/sqrt(1 + t^2)``; odd ``m`` with sigma-dependent graph."""
    return make_chart(_vec(order, [0] * m + [1], [0], [0]), _vec(order, [0], [1], [0, 1]))


def doubled_whitney_chart(order: int = 12) -> RuledChart:
    """Whitney umbrella reparametrized by ``t -> t^2``: ``m = 4`` with an even ``D``."""
    return make_chart(_vec(order, [0, 0, 0, 0, 1], [0], [0]), _vec(order, [0], [1], [0, 0, 1]))


@dataclass(frozen=True)
class LineFamily:
    """A ruling given by float callables, for surfaces without rational charts."""

    base: object
    direction: object
    window: tuple[float, float] = (-1.0, 1.0)

    def line(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        p = np.asarray(self.base(t), dtype=float)
        d = np.asarray(self.direction(t), dtype=float)
        return p, d / np.linalg.norm(d)


def hyperboloid_family(window: tuple[float, float] = (-1.0, 1.0)) -> LineFamily:
    """One ruling of ``x1^2 + x2^2 - x3^2 = 1``."""
    return LineFamily(
        lambda t: (math.cos(t), math.sin(t), 0.0),
        lambda t: (-math.sin(t) / math.sqrt(2), math.cos(t) / math.sqrt(2), 1 / math.sqrt(2)),
        window,
    )
