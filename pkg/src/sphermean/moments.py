"""Moment polynomials of discrete measures.

For a measure ``mu = sum w_i delta_{x_i}`` the k-th moment polynomial is
``Q_k(x) = c_k sum_i w_i |x - x_i|^{2k}`` with the normalized Bessel
coefficients ``c_k``. With that normalization the Laplacian steps down the
family, ``Laplacian(Q_k) = -Q_{k-1}``, and the first nonzero member is a
harmonic polynomial whose zero set contains every common zero of the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .generators import DiscreteMeasure, bessel_coeffs
from .polynomials import Poly, laplacian


@dataclass(frozen=True)
class MomentFamily:
    dim: int
    polys: tuple[Poly, ...]
    coeffs: tuple[Fraction, ...]
    source: DiscreteMeasure

    @property
    def K(self) -> int:
        return len(self.polys) - 1


def _check_dim(mu: DiscreteMeasure, dim: int) -> None:
    if mu.points and mu.dim != dim:
        raise ValueError(f"measure lives in dimension {mu.dim}, not {dim}")


def _int_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return out


def _power_sums(mu: DiscreteMeasure, K: int, dim: int) -> list[Poly]:
    """``S_k = sum_i w_i |x - x_i|^{2k}`` for ``k = 0..K``.

    All work happens in integers: with ``L`` a common denominator of the
    coordinates and ``W`` one of the weights, ``W L^{2k} S_k`` has integer
    coefficients.
    """
    if not mu.points:
        return [Poly.zero(dim) for _ in range(K + 1)]
    L = math.lcm(*(c.denominator for p in mu.points for c in p))
    W = math.lcm(*(w.denominator for w in mu.weights))
    unit = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    totals: list[dict] = [{} for _ in range(K + 1)]
    for p, w in zip(mu.points, mu.weights):
        a = [int(c * L) for c in p]
        # integer coefficients of L^2 |x - p|^2
        q: dict = {(0,) * dim: sum(v * v for v in a)}
        for i in range(dim):
            q[tuple(2 * u for u in unit[i])] = L * L
            if a[i]:
                q[unit[i]] = -2 * L * a[i]
        acc = {(0,) * dim: int(w * W)}
        for k in range(K + 1):
            if k:
                acc = _int_mul(acc, q)
            tot = totals[k]
            for e, c in acc.items():
                tot[e] = tot.get(e, 0) + c
    out = []
    for k, tot in enumerate(totals):
        den = W * L ** (2 * k)
        out.append(Poly(dim, {e: Fraction(c, den) for e, c in tot.items() if c}))
    return out


def moment_family(mu: DiscreteMeasure, K: int, dim: int, coeffs: Sequence | None = None) -> MomentFamily:
    """``Q_0..Q_K``; pass ``coeffs`` to replace the Bessel normalization."""
    _check_dim(mu, dim)
    cs = tuple(Fraction(c) for c in coeffs) if coeffs is not None else tuple(bessel_coeffs(dim, K))
    if len(cs) < K + 1:
        raise ValueError("need K+1 coefficients")
    sums = _power_sums(mu, K, dim)
    return MomentFamily(dim, tuple(s * c for s, c in zip(sums, cs)), cs[: K + 1], mu)


def moment_poly(mu: DiscreteMeasure, k: int, dim: int) -> Poly:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return moment_family(mu, k, dim).polys[k]


def check_recursion(mu: DiscreteMeasure, K: int, dim: int, coeffs: Sequence | None = None) -> bool:
    """True iff ``Laplacian(Q_k) + Q_{k-1} = 0`` exactly for ``1 <= k <= K``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    fam = moment_family(mu, K, dim, coeffs)
    return all((laplacian(fam.polys[k]) + fam.polys[k - 1]).is_zero() for k in range(1, K + 1))


def harmonic_minor(mu: DiscreteMeasure, K: int, dim: int) -> tuple[int, Poly] | None:
    """First nonzero moment polynomial ``(k0, Q_k0)``, or None when ``Q_0..Q_K`` all vanish."""
    fam = moment_family(mu, K, dim)
    for k, q in enumerate(fam.polys):
        if not q.is_zero():
            return k, q
    return None


def common_zero_sample(mu: DiscreteMeasure, K: int, grid, tol: float, dim: int | None = None) -> np.ndarray:
    """Grid points where ``|Q_k(x)| <= tol (1 + |x|)^{2k}`` for every ``k <= K``.

    These are common zeros of the truncated family only; nothing is claimed
    about higher moments.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    pts = np.asarray(grid, dtype=float)
    if dim is None:
        dim = mu.dim if mu.points else pts.shape[-1]
    pts = pts.reshape(-1, dim)
    fam = moment_family(mu, K, dim)
    keep = np.ones(len(pts), dtype=bool)
    scale = 1.0 + np.linalg.norm(pts, axis=1)
    for k, q in enumerate(fam.polys):
        if q.is_zero():
            continue
        keep &= np.abs(q.evaluate_array(pts)) <= tol * scale ** (2 * k)
    return pts[keep]


def random_measure(rng, dim: int, max_points: int = 5, bound: int = 5) -> DiscreteMeasure:
    """A random measure with small rational coordinates and weights."""
    n = int(rng.integers(1, max_points + 1))
    pts: set[tuple[Fraction, ...]] = set()
    while len(pts) < n:
        pts.add(tuple(Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, 4)))
                      for _ in range(dim)))
    weights = []
    for _ in range(n):
        w = 0
        while w == 0:
            w = int(rng.integers(-bound, bound + 1))
        weights.append(Fraction(w, int(rng.integers(1, 4))))
    return DiscreteMeasure(tuple(sorted(pts)), tuple(weights))
