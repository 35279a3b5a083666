"""Singular points of ruled surfaces: canonical form and classification.

Near a singular point ``a`` an analytic ruled surface can be written as

    u(s, sigma) = s^m v_m + sigma s^m e_0 + D(s, sigma) tau

with ``v_m``, ``e_0``, ``tau`` pairwise orthogonal. The integer ``m`` and the
parity of ``D`` in ``s`` decide the local type: odd ``m`` gives a smooth
point, even ``m`` with ``D`` not even gives a cuspidal point, ``D = 0`` gives
a plane. All arithmetic is exact; ``sigma`` is carried as a polynomial
variable, so every "vanishes identically" test is a test on rational
coefficients up to the truncation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..polynomials import LinearForm, Poly
from ..series import Series, VecSeries, cross, dot
from .charts import RuledChart, orthogonalize_chart, recenter

SIGMA = Poly.var(0, 1)


class NotSingular(ValueError):
    """The parametrization is regular at the requested parameters."""


class TruncationTooLow(ValueError):
    """The series order is too small to reach the first term of ``D``."""


def _rationalize(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x)) if isinstance(x, str) else Fraction(x).limit_denominator(10**12)


def _vec_is_zero(v: Sequence) -> bool:
    return all(c == 0 for c in v)


@dataclass(frozen=True, eq=False)
class SingularShift:
    """The shifted base curve ``v(t) = u(t) + lam0 e(t) - a`` of an orthogonalized chart."""

    v: VecSeries
    chart: RuledChart
    lambda0: Fraction
    point: tuple[Fraction, ...]

    @property
    def is_cone(self) -> bool:
        return self.v.is_zero()

    @property
    def m(self) -> int:
        return self.v.valuation()


def _prepare(chart: RuledChart, t0) -> RuledChart:
    t0 = _rationalize(t0)
    local = recenter(chart, t0) if t0 != 0 else chart
    return orthogonalize_chart(local, 0)


def _tangent(chart: RuledChart, lam: Fraction) -> tuple:
    du = chart.u.coeff(1)
    de = chart.e.coeff(1)
    return tuple(a + lam * b for a, b in zip(du, de))


def solve_lambda0(chart: RuledChart) -> Fraction | None:
    """Line parameter where the orthogonalized chart is singular at ``t = 0``, if any."""
    du = chart.u.coeff(1)
    de = chart.e.coeff(1)
    nde = dot(de, de)
    if nde == 0:
        return Fraction(0) if _vec_is_zero(du) else None
    lam = -dot(du, de) / nde
    return lam if _vec_is_zero(_tangent(chart, lam)) else None


def singular_shift(chart: RuledChart, t0=0, lambda0=None) -> SingularShift:
    """Orthogonalize at ``t0``, check the singularity at ``lambda0`` and translate it to 0.

    ``lambda0=None`` solves for the singular line parameter. Raises
    :class:`NotSingular` when the Jacobian has rank 2 there.
    """
    local = _prepare(chart, t0)
    if local.order < 1:
        raise TruncationTooLow("need at least first-order coefficients")
    if lambda0 is None:
        lam = solve_lambda0(local)
        if lam is None:
            raise NotSingular("no line parameter makes the Jacobian degenerate")
    else:
        lam = _rationalize(lambda0)
        if not _vec_is_zero(_tangent(local, lam)):
            raise NotSingular("Jacobian has rank 2 at the given parameters")
    a = tuple(x + lam * y for x, y in zip(local.u.coeff(0), local.e.coeff(0)))
    v = local.u + local.e * lam
    v = VecSeries([c - Series.const(ai, c.order) for c, ai in zip(v.components, a)])
    return SingularShift(v, local, lam, a)


@dataclass(frozen=True, eq=False)
class CanonicalChart:
    """``s^m v_m + sigma s^m e_0 + D(s, sigma) tau`` around ``point``.

    ``tau = v_m x e_0`` is kept unnormalized so the basis stays rational;
    :attr:`tau_unit` gives the unit vector.
    """

    m: int
    basis: tuple[tuple[Fraction, ...], tuple[Fraction, ...], tuple[Fraction, ...]]
    D: Series
    j0: int | None
    point: tuple[Fraction, ...]
    descended: int = 0
    mu: Series | None = field(default=None, repr=False)
    t_of_s: Series | None = field(default=None, repr=False)
    shift: SingularShift | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.D.order

    @property
    def tau_unit(self) -> np.ndarray:
        tau = np.array([float(c) for c in self.basis[2]])
        return tau / np.linalg.norm(tau)

    def D_terms(self) -> list[tuple[int, int, Fraction]]:
        """Nonzero coefficients ``(alpha, beta, c)`` of ``c s^alpha sigma^beta`` in ``D``."""
        out = []
        for a, coeff in enumerate(self.D.coeffs):
            if isinstance(coeff, Poly):
                for (b,), c in sorted(coeff.items()):
                    out.append((a, b, c))
            elif coeff != 0:
                out.append((a, 0, Fraction(coeff)))
        return out


def _first_odd(D: Series, start: int) -> int | None:
    for j in range(start, D.order + 1):
        if j % 2 and D.coeffs[j] != 0:
            return j
    return None


def canonical_form(chart: RuledChart, t0=0, lambda0=None) -> CanonicalChart:
    """Reduce a singular point of ``chart`` to canonical form.

    Raises :class:`NotSingular` for regular points, ``ValueError`` when the
    lines are concurrent (a cone), and :class:`TruncationTooLow` when the
    series order cannot reach ``s^(m+1)``.
    """
    sh = chart if isinstance(chart, SingularShift) else singular_shift(chart, t0, lambda0)
    if sh.is_cone:
        raise ValueError("all lines pass through the singular point (cone); no canonical form")
    v, e = sh.v, sh.chart.e
    m = sh.m
    if v.order < m + 1:
        raise TruncationTooLow(f"order {v.order} cannot resolve terms beyond s^{m}")
    vm = v.coeff(m)
    e0 = e.coeff(0)
    tau = cross(vm, e0)
    if dot(vm, e0) != 0:
        raise ValueError("leading coefficient not orthogonal to e(0); chart not orthogonalized")
    nvm, ne0, ntau = dot(vm, vm), dot(e0, e0), dot(tau, tau)

    A = v.dot_const(vm) * (1 / nvm)
    B = v.dot_const(e0) * (1 / ne0)
    C = v.dot_const(tau) * (1 / ntau)
    Ah = e.dot_const(vm) * (1 / nvm)
    Bh = e.dot_const(e0) * (1 / ne0)
    Ch = e.dot_const(tau) * (1 / ntau)

    # mu solves B + mu Bh = sigma (A + mu Ah); the denominator starts with 1
    mu = (A * SIGMA - B) * (Bh - Ah * SIGMA).inverse()
    P = A + mu * Ah
    U = P.shift_down(m)
    s_of_t = U.power(Fraction(1, m)).shift_up(1)
    t_of_s = s_of_t.reversion()
    D = (C + mu * Ch).compose(t_of_s)
    if D.order < m + 1:
        raise TruncationTooLow(f"D is only known through s^{D.order}; need s^{m + 1}")
    if D.valuation() <= m:
        raise ArithmeticError("D has terms of degree <= m; chart data inconsistent")
    return CanonicalChart(
        m=m,
        basis=(tuple(vm), tuple(e0), tuple(tau)),
        D=D,
        j0=_first_odd(D, m + 1),
        point=sh.point,
        mu=mu,
        t_of_s=t_of_s,
        shift=sh,
    )


def reconstruction_residual(cc: CanonicalChart, sigma=None) -> Fraction:
    """Largest coefficient of ``u(t(s), mu) - canonical(s, sigma)`` through the valid order.

    With ``sigma=None`` the comparison is made in the polynomial ring, i.e.
    for all ``sigma`` at once.
    """
    sh = cc.shift
    if sh is None:
        raise ValueError("chart was not produced by canonical_form")
    sig = SIGMA if sigma is None else Fraction(sigma)
    spec = (lambda x: x) if sigma is None else (lambda x: x.at_sigma(sig))
    t_s = spec(cc.t_of_s)
    mu_s = spec(cc.mu).compose(t_s)
    actual = sh.v.compose(t_s) + sh.chart.e.compose(t_s) * mu_s
    D = spec(cc.D)
    sm = Series.monomial(1, cc.m, D.order)
    vm, e0, tau = cc.basis
    model = VecSeries([sm * a + sm * b * sig + D * c for a, b, c in zip(vm, e0, tau)])
    diff = actual - model
    worst = Fraction(0)
    for comp in diff.components:
        for c in comp.coeffs:
            mag = max((abs(x) for _, x in c.items()), default=Fraction(0)) if isinstance(c, Poly) else abs(c)
            worst = max(worst, mag)
    return worst


def descend_evenness(cc: CanonicalChart) -> CanonicalChart:
    """Substitute ``s' = s^2`` while ``m`` is even and ``D`` is even (and nonzero)."""
    while cc.m % 2 == 0 and not cc.D.is_zero() and cc.D.is_even():
        D = cc.D.contract_power(2)
        m = cc.m // 2
        cc = replace(cc, m=m, D=D, j0=_first_odd(D, m + 1), descended=cc.descended + 1,
                     mu=None, t_of_s=None)
    return cc


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class RegularPoint:
    reason: str
    order: int
    case: str = "regular"

    def to_json(self) -> dict:
        return {"case": self.case, "reason": self.reason, "order": self.order}


@dataclass(frozen=True)
class Plane:
    normal: tuple[Fraction, ...]
    order: int
    case: str = "plane"

    def to_json(self) -> dict:
        return {"case": self.case, "normal": [str(c) for c in self.normal], "order": self.order}


@dataclass(frozen=True)
class Cone:
    vertex: tuple[Fraction, ...]
    order: int
    case: str = "cone"

    def to_json(self) -> dict:
        return {"case": self.case, "vertex": [str(c) for c in self.vertex], "order": self.order}


@dataclass(frozen=True)
class Cuspidal:
    form: LinearForm
    point: tuple[Fraction, ...]
    m: int
    j0: int
    order: int
    case: str = "cuspidal"

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "form": [str(c) for c in self.form.coeffs],
            "point": [str(c) for c in self.point],
            "m": self.m,
            "j0": self.j0,
            "order": self.order,
        }


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    order: int
    case: str = "inconclusive"

    def to_json(self) -> dict:
        return {"case": self.case, "reason": self.reason, "order": self.order}


SingularityVerdict = RegularPoint | Plane | Cone | Cuspidal | Inconclusive


def _pencil_normal(e: VecSeries) -> tuple[Fraction, ...] | None:
    """Normal of the plane containing every direction ``e_j``, if they are coplanar."""
    coeffs = [c for c in e.coeffs if not _vec_is_zero(c)]
    n = None
    for c in coeffs[1:]:
        cand = cross(coeffs[0], c)
        if not _vec_is_zero(cand):
            n = cand
            break
    if n is None:
        return None
    return n if all(dot(n, c) == 0 for c in coeffs) else None


def classify_singularity(chart: RuledChart, t0=0, lambda0=None) -> SingularityVerdict:
    """Decide the local type of the surface at parameters ``(t0, lambda0)``.

    ``lambda0=None`` searches for a singular point on the ruling at ``t0``.
    """
    order = chart.order
    try:
        sh = singular_shift(chart, t0, lambda0)
    except NotSingular as exc:
        return RegularPoint(f"jacobian has rank 2 ({exc})", order)
    except TruncationTooLow as exc:
        return Inconclusive(str(exc), order)
    if sh.is_cone:
        normal = _pencil_normal(sh.chart.e)
        if normal is not None:
            return Plane(LinearForm(normal).normalized().coeffs, order)
        if sh.chart.e.valuation() > sh.chart.e.order or all(
            _vec_is_zero(cross(sh.chart.e.coeff(0), c)) for c in sh.chart.e.coeffs
        ):
            return Inconclusive("all rulings coincide; no surface", order)
        return Cone(sh.point, order)
    try:
        cc = canonical_form(sh)
    except TruncationTooLow as exc:
        return Inconclusive(str(exc), order)
    if cc.D.is_zero():
        # D only vanishes through the truncation order; accept a plane when
        # the known chart data really lie in the plane normal to tau.
        tau = cc.basis[2]
        local = sh.chart
        shifted = [tuple(c - a for c, a in zip(local.u.coeff(0), sh.point))] + local.u.coeffs[1:]
        if all(dot(c, tau) == 0 for c in shifted + local.e.coeffs):
            return Plane(LinearForm(tau).normalized().coeffs, cc.order)
        return Inconclusive("D vanishes through the truncation order but the chart is not planar", cc.order)
    cc = descend_evenness(cc)
    if cc.m % 2:
        return RegularPoint(f"smooth point (odd m={cc.m})", cc.order)
    if cc.j0 is not None:
        return Cuspidal(LinearForm(cc.basis[2]).normalized(), cc.point, cc.m, cc.j0, cc.order)
    return Inconclusive("D is even through the truncation order", cc.order)


# ---------------------------------------------------------------------------
# graph of the surface at an odd-m point


@dataclass(frozen=True, eq=False)
class PuiseuxGraph:
    """``z(x1, x2) = sum b x1^nu x2^beta`` in the coordinates of the canonical basis.

    ``x1``, ``x2``, ``z`` are coefficients along ``v_m``, ``e_0``, ``tau``.
    """

    m: int
    terms: tuple[tuple[Fraction, int, Fraction], ...]
    chart: CanonicalChart

    @property
    def homogeneity(self) -> list[Fraction]:
        return [nu + beta for nu, beta, _ in self.terms]

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(x1, x2).shape)
        nz = x1 != 0
        x1b, x2b = np.broadcast_to(x1, out.shape), np.broadcast_to(x2, out.shape)
        s = np.sign(x1b[nz]) * np.abs(x1b[nz]) ** (1.0 / self.m)
        sig = x2b[nz] / x1b[nz]
        acc = np.zeros_like(s)
        for alpha, beta, c in self.chart.D_terms():
            acc += float(c) * s**alpha * sig**beta
        out[nz] = acc
        if not all(nu > 0 for nu, _, _ in self.terms):
            out[~nz] = np.nan
        return out if out.ndim else float(out)


def puiseux_graph(cc: CanonicalChart) -> PuiseuxGraph:
    """Fractional power series of the surface as a graph over the ``(v_m, e_0)`` plane."""
    if cc.m % 2 == 0:
        raise ValueError("the graph expansion needs odd m")
    terms = tuple(
        (Fraction(alpha, cc.m) - beta, beta, c) for alpha, beta, c in cc.D_terms()
    )
    return PuiseuxGraph(cc.m, terms, cc)
