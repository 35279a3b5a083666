"""Distances between ruling lines, extremal pairs and antipodal points."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

PARALLEL_TOL = 1e-12


class ParallelLines(ValueError):
    """The two lines are parallel, so closest points are not unique."""


def line_distance(p1, d1, p2, d2) -> tuple[float, float, float]:
    """Distance between lines ``p1 + lam d1`` and ``p2 + mu d2`` with the closest parameters.

    Directions are normalized first, so ``lam`` and ``mu`` are arclength
    parameters. Raises :class:`ParallelLines` when ``1 - <d1, d2>^2`` is at
    most ``1e-12``.
    """
    p1, p2 = np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)
    d1 = np.asarray(d1, dtype=float) / np.linalg.norm(d1)
    d2 = np.asarray(d2, dtype=float) / np.linalg.norm(d2)
    c = float(d1 @ d2)
    den = 1.0 - c * c
    if den <= PARALLEL_TOL:
        raise ParallelLines(f"lines are parallel (1 - <e,e'>^2 = {den:.3g})")
    w = p1 - p2
    wt, ws = float(w @ d1), float(w @ d2)
    lam = (c * ws - wt) / den
    mu = (ws - c * wt) / den
    a = p1 + lam * d1
    b = p2 + mu * d2
    return float(np.linalg.norm(a - b)), lam, mu


def chart_line_distance(chart, t: float, s: float) -> tuple[float, float, float]:
    """``line_distance`` between the rulings at parameters ``t`` and ``s``."""
    if t == s:
        return 0.0, 0.0, 0.0
    p1, d1 = chart.line(t)
    p2, d2 = chart.line(s)
    return line_distance(p1, d1, p2, d2)


@dataclass
class ExtremalReport:
    t0: float
    s0: float
    dmax: float
    skipped_parallel: int = 0
    grid_best: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))


def extremal_lines(chart, resolution: int = 41, window: tuple[float, float] | None = None,
                   refine: bool = True) -> ExtremalReport:
    """Maximize the line distance ``d(t, s)`` over a parameter window.

    A ``resolution x resolution`` grid is scanned first (ties keep the
    lexicographically smallest pair), then the best pair is polished with a
    bounded local search; the polish is kept only if it improves ``d``.
    Parallel pairs are skipped and counted.
    """
    if window is None:
        window = getattr(chart, "window", (-1.0, 1.0))
    lo, hi = window
    grid = np.linspace(lo, hi, resolution)
    lines = [chart.line(t) for t in grid]
    best = (0.0, float(grid[0]), float(grid[0]))
    skipped = 0
    for i, t in enumerate(grid):
        for j, s in enumerate(grid):
            if i == j:
                continue
            try:
                d, _, _ = line_distance(lines[i][0], lines[i][1], lines[j][0], lines[j][1])
            except ParallelLines:
                skipped += 1
                continue
            if d > best[0]:
                best = (d, float(t), float(s))
    report = ExtremalReport(best[1], best[2], best[0], skipped, (best[1], best[2], best[0]))
    if not refine or best[0] == 0.0:
        return report

    def neg(z):
        try:
            return -chart_line_distance(chart, float(z[0]), float(z[1]))[0]
        except ParallelLines:
            return 0.0

    res = minimize(neg, x0=[best[1], best[2]], method="L-BFGS-B", bounds=[(lo, hi), (lo, hi)])
    if res.success and -res.fun > best[0]:
        report.t0, report.s0, report.dmax = float(res.x[0]), float(res.x[1]), float(-res.fun)
    return report


def antipodal_check(normal_a, normal_b, a, b, tol: float = 1e-10) -> bool:
    """True iff ``a - b`` is parallel to both surface normals within ``tol``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    w = a - b
    n = np.linalg.norm(w)
    if n == 0:
        raise ValueError("antipodal points must be distinct")
    w /= n
    for nu in (normal_a, normal_b):
        nu = np.asarray(nu, dtype=float)
        nu = nu / np.linalg.norm(nu)
        if np.linalg.norm(np.cross(w, nu) if len(w) == 3 else w[0] * nu[1] - w[1] * nu[0]) > tol:
            return False
    return True
