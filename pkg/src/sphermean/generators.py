"""Compactly supported sources, normalized Bessel functions and eigenfunction families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .polynomials import Poly, is_harmonic


@dataclass(frozen=True)
class BumpSpec:
    """Smooth radial profile supported on ``[r_in, r_out]``, peak ``e^-1`` at the midpoint."""

    r_in: float
    r_out: float

    def __post_init__(self):
        if not self.r_in > 0:
            raise ValueError("r_in must be positive")
        if not self.r_out > self.r_in:
            raise ValueError("r_out must exceed r_in")

    @property
    def peak(self) -> float:
        return math.exp(-1.0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        u = (2.0 * r - self.r_in - self.r_out) / (self.r_out - self.r_in)
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
        return out if out.ndim else float(out)


class CompactFunction:
    """Base class for sources that can be evaluated pointwise.

    Subclasses implement :meth:`evaluate` on an ``(n, dim)`` array and report a
    bounding ball via :attr:`support_center` and :attr:`support_radius`.
    """

    kind = "abstract"
    dim: int

    def evaluate(self, points) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        vals = self.evaluate(pts.reshape(-1, self.dim))
        return float(vals[0]) if pts.ndim == 1 else vals

    @property
    def support_center(self) -> np.ndarray:
        return np.zeros(self.dim)

    @property
    def support_radius(self) -> float:
        raise NotImplementedError

    def sup_estimate(self, samples: int = 200_000, seed: int = 0) -> float:
        """Estimate ``sup |f|`` by random sampling of the bounding ball."""
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(samples, self.dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts *= self.support_radius * rng.random(samples)[:, None] ** (1.0 / self.dim)
        pts += self.support_center
        return float(np.max(np.abs(self.evaluate(pts))))


def _as_point(x, dim: int | None = None) -> np.ndarray:
    arr = np.asarray([float(v) for v in x])
    if dim is not None and arr.shape != (dim,):
        raise ValueError(f"expected a {dim}-vector, got shape {arr.shape}")
    return arr


@dataclass(eq=False)
class RadialHarmonic(CompactFunction):
    """``f(x) = alpha(|x - c|) h((x - c)/|x - c|)`` for a solid harmonic ``h``."""

    alpha: BumpSpec
    h: Poly
    center: np.ndarray | None = None
    kind = "radial_harmonic"

    def __post_init__(self):
        if self.h.is_zero() or not self.h.is_homogeneous():
            raise ValueError("h must be a nonzero homogeneous polynomial")
        if not is_harmonic(self.h):
            raise ValueError("h must be harmonic")
        self.dim = self.h.dim
        self.center = np.zeros(self.dim) if self.center is None else _as_point(self.center, self.dim)
        self._deg = self.h.degree

    @property
    def support_center(self) -> np.ndarray:
        return self.center

    @property
    def support_radius(self) -> float:
        return float(self.alpha.r_out)

    def evaluate(self, points) -> np.ndarray:
        y = np.asarray(points, dtype=float) - self.center
        r = np.sqrt(np.einsum("ij,ij->i", y, y))
        out = np.zeros(len(y))
        inside = (r > self.alpha.r_in) & (r < self.alpha.r_out)
        if not inside.any():
            return out
        yi, ri = y[inside], r[inside]
        out[inside] = self.alpha(ri) * self.h.evaluate_array(yi) / ri ** self._deg
        return out

    def sup_estimate(self, samples: int = 200_000, seed: int = 0) -> float:
        # the profile peaks at e^-1, so only the angular factor needs sampling
        rng = np.random.default_rng(seed)
        w = rng.normal(size=(samples, self.dim))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        return self.alpha.peak * float(np.max(np.abs(self.h.evaluate_array(w))))


def radial_harmonic(alpha: BumpSpec, h: Poly, center=None) -> RadialHarmonic:
    return RadialHarmonic(alpha, h, center)


def reflect_points(points, point, normal) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    a = _as_point(point)
    nu = _as_point(normal)
    return pts - 2.0 * ((pts - a) @ nu)[..., None] * nu


@dataclass(eq=False)
class OddPlane(CompactFunction):
    """``f(x) = g(x) - g(reflection of x)`` across the plane through ``point`` with ``normal``."""

    point: np.ndarray
    normal: np.ndarray
    profile: CompactFunction
    kind = "odd_plane"

    def __post_init__(self):
        self.point = _as_point(self.point)
        self.normal = _as_point(self.normal)
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-14:
            raise ValueError("normal must be a unit vector")
        self.dim = len(self.point)
        if self.profile.dim != self.dim or len(self.normal) != self.dim:
            raise ValueError("dimension mismatch between plane and profile")

    @property
    def support_center(self) -> np.ndarray:
        return self.point

    @property
    def support_radius(self) -> float:
        offset = np.linalg.norm(self.profile.support_center - self.point)
        return float(offset + self.profile.support_radius)

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return self.profile.evaluate(pts) - self.profile.evaluate(
            reflect_points(pts, self.point, self.normal)
        )


def odd_reflection(point, normal, g: CompactFunction) -> OddPlane:
    return OddPlane(point, normal, g)


@dataclass(eq=False)
class GridSample(CompactFunction):
    """Trilinear (or bilinear) interpolation of samples on a regular grid; zero outside."""

    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray
    kind = "grid"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.dim = self.values.ndim
        self.origin = _as_point(self.origin, self.dim)
        self.spacing = np.broadcast_to(np.asarray(self.spacing, dtype=float), (self.dim,)).copy()
        if np.any(self.spacing <= 0):
            raise ValueError("spacing must be positive")
        axes = [self.origin[i] + self.spacing[i] * np.arange(n) for i, n in enumerate(self.values.shape)]
        self._interp = RegularGridInterpolator(axes, self.values, bounds_error=False, fill_value=0.0)

    @property
    def support_center(self) -> np.ndarray:
        return self.origin + self.spacing * (np.array(self.values.shape) - 1) / 2

    @property
    def support_radius(self) -> float:
        return float(np.linalg.norm(self.spacing * (np.array(self.values.shape) - 1)) / 2)

    def evaluate(self, points) -> np.ndarray:
        return self._interp(np.asarray(points, dtype=float))

    def sup_estimate(self, samples: int = 0, seed: int = 0) -> float:
        # multilinear interpolation attains its extremes at grid nodes
        return float(np.max(np.abs(self.values)))


@dataclass(eq=False)
class DiscreteMeasure:
    """Finite signed combination of point masses with rational data."""

    points: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...]
    kind = "discrete"

    def __post_init__(self):
        pts = tuple(tuple(Fraction(c) for c in p) for p in self.points)
        ws = tuple(Fraction(w) for w in self.weights)
        if len(pts) != len(ws):
            raise ValueError("points and weights differ in length")
        if any(w == 0 for w in ws):
            raise ValueError("weights must be nonzero")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be distinct")
        if len({len(p) for p in pts}) > 1:
            raise ValueError("points have mixed dimensions")
        self.points, self.weights = pts, ws

    @property
    def dim(self) -> int | None:
        return len(self.points[0]) if self.points else None

    def __len__(self) -> int:
        return len(self.points)

    def evaluate(self, points):
        raise TypeError("a discrete measure has no pointwise values")


# ---------------------------------------------------------------------------
# normalized Bessel functions


def bessel_coeffs(dim: int, K: int) -> list[Fraction]:
    """Taylor coefficients ``c_0..c_K`` of the normalized Bessel function in ``z^2``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    out = [Fraction(1)]
    for k in range(1, K + 1):
        out.append(-out[-1] / (2 * k * (2 * k + dim - 2)))
    return out


def _series_bessel_decimal(dim: int, z: float) -> float:
    # Summing the alternating series in floating point loses all digits for
    # large |z|; extra decimal digits cover the cancellation (terms peak
    # near e^|z|).
    z = abs(float(z))
    if z == 0.0:
        return 1.0
    with localcontext() as ctx:
        ctx.prec = 30 + int(0.44 * z)
        zz = Decimal(z) * Decimal(z)
        term = Decimal(1)
        total = Decimal(1)
        tiny = Decimal(10) ** (-25)
        k = 0
        while True:
            k += 1
            term = -term * zz / (2 * k * (2 * k + dim - 2))
            total += term
            if 2 * k > z and abs(term) < tiny:
                break
        return float(total)


def normalized_bessel(dim: int, z):
    """``j(z)`` with ``j(0) = 1``: ``sin z / z`` in dim 3, ``J_0(z)`` in dim 2.

    Accepts a scalar or an array.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    arr = np.asarray(z, dtype=float)
    if dim == 3:
        out = np.sinc(arr / np.pi)
    else:
        flat = arr.reshape(-1)
        out = np.array([_series_bessel_decimal(2, v) for v in flat]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# eigenfunctions


def plane_wave_eigenfunction(h: Poly, lam: float, x, rule) -> complex | np.ndarray:
    """Quadrature value of ``integral e^{i lam <x, w>} h(w) dA(w)`` over the unit sphere.

    ``x`` may be a single point or an ``(n, dim)`` array.
    """
    if rule.dim != h.dim:
        raise ValueError("rule dimension does not match h")
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, rule.dim)
    hw = h.evaluate_array(rule.nodes) * rule.weights
    phase = np.exp(1j * lam * (pts @ rule.nodes.T))
    vals = phase @ hw
    return complex(vals[0]) if single else vals


def helmholtz_residual(h: Poly, lam: float, x, rule, step: float = 1e-3) -> float:
    """Relative residual of ``Laplacian(phi) + lam^2 phi`` by central differences.

    The scale is ``lam^2 * sum w |h(w)|``, a bound on ``lam^2 |phi|`` that does
    not degenerate at zeros of ``phi``.
    """
    x = np.asarray(x, dtype=float)
    d = len(x)
    stencil = [x]
    for i in range(d):
        for sgn in (1.0, -1.0):
            y = x.copy()
            y[i] += sgn * step
            stencil.append(y)
    vals = plane_wave_eigenfunction(h, lam, np.array(stencil), rule)
    lap = (vals[1:].sum() - 2 * d * vals[0]) / step**2
    scale = lam**2 * float(np.abs(h.evaluate_array(rule.nodes)) @ rule.weights)
    return float(abs(lap + lam**2 * vals[0]) / scale)


def _exact_point(x) -> tuple[Fraction, ...]:
    return tuple(v if isinstance(v, Fraction) else Fraction(v) for v in x)


def spectral_projection_discrete(mu: DiscreteMeasure, lam, x) -> float:
    """``sum_i w_i j(lam |x - x_i|)`` for a discrete measure.

    Squared distances are formed exactly and masses at equal distance are
    merged before any rounding, so symmetric cancellations are exact.
    """
    if not mu.points:
        return 0.0
    xq = _exact_point(x)
    if len(xq) != mu.dim:
        raise ValueError("point dimension does not match the measure")
    merged: dict[Fraction, Fraction] = {}
    for p, w in zip(mu.points, mu.weights):
        d2 = sum((a - b) ** 2 for a, b in zip(xq, p))
        merged[d2] = merged.get(d2, 0) + w
    lam = abs(float(lam))
    terms = [
        float(w) * normalized_bessel(mu.dim, lam * math.sqrt(d2))
        for d2, w in merged.items()
        if w
    ]
    return math.fsum(terms)


@dataclass(eq=False)
class EigenFamily:
    """The eigenfunction family ``phi_lambda`` generated by a source."""

    source: object
    dim: int
    rule: object = None
    _h: Poly | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if isinstance(self.source, RadialHarmonic):
            self._h = self.source.h
            if self.rule is None:
                from .spherical_means import sphere_rule

                self.rule = sphere_rule(self.dim, 48)
        elif not isinstance(self.source, DiscreteMeasure):
            raise TypeError("eigenfamilies are built from discrete measures or radial harmonics")

    def __call__(self, lam: float, x):
        if isinstance(self.source, DiscreteMeasure):
            return spectral_projection_discrete(self.source, lam, x)
        shifted = np.asarray(x, dtype=float) - self.source.center
        return plane_wave_eigenfunction(self._h, lam, shifted, self.rule)


# ---------------------------------------------------------------------------
# sampling zero sets


def sample_zero_set(h: Poly, count: int, max_norm: float, rng, center=None,
                    steps: int = 64) -> np.ndarray:
    """``count`` points with ``h(x - center) = 0`` and ``|x - center| <= max_norm``.

    Random chords of the ball are scanned for sign changes, then bisected to
    machine precision.
    """
    dim = h.dim
    c = np.zeros(dim) if center is None else _as_point(center, dim)
    out: list[np.ndarray] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * max(count, 1):
            raise RuntimeError("could not find enough zeros; is the zero set empty?")
        p = rng.normal(size=dim)
        p *= max_norm * rng.random() ** (1.0 / dim) / np.linalg.norm(p)
        d = rng.normal(size=dim)
        d /= np.linalg.norm(d)
        # chord of the ball through p in direction d
        b = p @ d
        disc = b * b - (p @ p - max_norm**2)
        s0, s1 = -b - math.sqrt(disc), -b + math.sqrt(disc)
        s = np.linspace(s0, s1, steps)
        vals = h.evaluate_array(p + s[:, None] * d)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if len(idx) == 0:
            continue
        i = idx[rng.integers(len(idx))]
        lo, hi = s[i], s[i + 1]
        flo = vals[i]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            fm = h.evaluate([float(v) for v in p + mid * d])
            if fm == 0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        out.append(c + p + 0.5 * (lo + hi) * d)
    return np.array(out).reshape(-1, dim)
