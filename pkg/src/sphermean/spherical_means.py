"""Sphere quadrature and the spherical mean operator."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .generators import CompactFunction, DiscreteMeasure


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes on the unit sphere with weights summing to one (normalized area)."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, g) -> float:
        """Apply the rule to a callable taking an ``(n, dim)`` array of nodes."""
        return float(np.asarray(g(self.nodes)) @ self.weights)


def sphere_rule(dim: int, order: int) -> QuadratureRule:
    """Uniform circle rule (dim 2) or Gauss-Legendre x uniform-azimuth product rule (dim 3).

    In dim 3 there are ``order`` polar nodes and ``2*order`` azimuths, which
    integrates spherical polynomials of degree up to ``2*order - 1`` exactly.
    """
    if order < 1:
        raise ValueError("order must be positive")
    if dim == 2:
        phi = 2 * np.pi * np.arange(order) / order
        nodes = np.column_stack([np.cos(phi), np.sin(phi)])
        return QuadratureRule(2, nodes, np.full(order, 1.0 / order))
    if dim != 3:
        raise ValueError("dim must be 2 or 3")
    z, wz = np.polynomial.legendre.leggauss(order)
    n_az = 2 * order
    phi = 2 * np.pi * np.arange(n_az) / n_az
    s = np.sqrt(1.0 - z * z)
    nodes = np.column_stack([
        np.outer(s, np.cos(phi)).ravel(),
        np.outer(s, np.sin(phi)).ravel(),
        np.repeat(z, n_az),
    ])
    # renormalize rounding so every node is a unit vector to working precision
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.repeat(wz / 2.0, n_az) / n_az
    return QuadratureRule(3, nodes, weights)


def _check_evaluable(f) -> None:
    if isinstance(f, DiscreteMeasure):
        raise TypeError(
            "spherical means of discrete measures are not pointwise; use the moment polynomials"
        )
    if not isinstance(f, CompactFunction):
        raise TypeError(f"cannot evaluate {type(f).__name__}")


def spherical_mean(f: CompactFunction, x, t: float, rule: QuadratureRule) -> float:
    """Quadrature approximation of the mean of ``f`` over the sphere ``|y - x| = t``."""
    _check_evaluable(f)
    if not t > 0:
        raise ValueError("radius must be positive")
    x = np.asarray(x, dtype=float)
    if x.shape != (rule.dim,) or f.dim != rule.dim:
        raise ValueError("dimension mismatch between center, function and rule")
    return float(f.evaluate(x + t * rule.nodes) @ rule.weights)


def mean_table(f: CompactFunction, centers, radii, rule: QuadratureRule,
               threads: int | None = None) -> np.ndarray:
    """Means for every (center, radius) pair as a ``(len(centers), len(radii))`` array.

    Work is split by center over at most ``threads`` workers (default from
    ``SPHERMEAN_THREADS``, else 1). Each entry is computed independently, so
    the table does not depend on the number of workers.
    """
    _check_evaluable(f)
    centers = np.asarray(centers, dtype=float).reshape(-1, rule.dim)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if f.dim != rule.dim:
        raise ValueError("function and rule dimensions differ")
    out = np.zeros((len(centers), len(radii)))
    if len(centers) == 0 or len(radii) == 0:
        return out
    offsets = radii[:, None, None] * rule.nodes[None, :, :]

    def row(i: int) -> None:
        pts = (centers[i] + offsets).reshape(-1, rule.dim)
        out[i] = f.evaluate(pts).reshape(len(radii), -1) @ rule.weights

    workers = threads if threads is not None else thread_count()
    if workers <= 1:
        for i in range(len(centers)):
            row(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(row, range(len(centers))))
    return out


def thread_count() -> int:
    raw = os.environ.get("SPHERMEAN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class MeanReport:
    max_abs: float
    argmax_center: np.ndarray | None
    argmax_radius: float | None
    count: int
    means: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "max_abs": self.max_abs,
            "argmax_center": None if self.argmax_center is None else [float(v) for v in self.argmax_center],
            "argmax_radius": self.argmax_radius,
            "count": self.count,
        }


def verify_zero_means(f: CompactFunction, centers, radii, rule: QuadratureRule,
                      threads: int | None = None) -> MeanReport:
    """Evaluate all (center, radius) pairs and report the largest absolute mean.

    Ties go to the first pair in row-major order, so the report is
    independent of evaluation order.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, rule.dim)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    table = mean_table(f, centers, radii, rule, threads)
    if table.size == 0:
        return MeanReport(0.0, None, None, 0, table)
    flat = int(np.argmax(np.abs(table)))
    i, j = divmod(flat, len(radii))
    return MeanReport(float(abs(table[i, j])), centers[i].copy(), float(radii[j]), int(table.size), table)


def write_means_csv(path, centers, radii, means) -> None:
    """One row per pair; floats use Python's shortest round-trip repr."""
    centers = np.asarray(centers, dtype=float)
    dim = centers.shape[1]
    header = ["cx", "cy", "cz"][:dim] + ["t", "mean"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, c in enumerate(centers):
            for j, t in enumerate(radii):
                w.writerow([repr(float(v)) for v in c] + [repr(float(t)), repr(float(means[i][j]))])


def default_radii(count: int, t_max: float) -> np.ndarray:
    """``count`` evenly spaced radii in ``(0, t_max]``."""
    return t_max * np.arange(1, count + 1) / count
