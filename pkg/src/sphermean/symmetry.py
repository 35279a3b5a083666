"""Reflections, the antipodal injectivity certificate, Coxeter closure and cone configurations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ruled.lines import antipodal_check

UNIT_TOL = 1e-14


def _unit(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > UNIT_TOL:
        raise ValueError("normal must be a unit vector")
    return nu


def reflect(x, a, nu) -> np.ndarray:
    """Mirror image of ``x`` across the hyperplane through ``a`` with unit normal ``nu``."""
    nu = _unit(nu)
    x = np.asarray(x, dtype=float)
    return x - 2.0 * float((x - np.asarray(a, dtype=float)) @ nu) * nu


# ---------------------------------------------------------------------------
# antipodal certificate


@dataclass
class ShrinkResult:
    radii: list[float]
    n: int
    terminated: bool

    @property
    def steps(self) -> int:
        return self.n - 1


def shrink_iteration(r1: float, dist: float, max_iter: int = 100_000) -> ShrinkResult:
    """Support radii ``r_{n+1} = sqrt(r_n^2 - dist^2)`` until ``r_n < dist``.

    ``n`` is the index of the first radius below ``dist``. Each radius is
    taken from the closed form ``r_n^2 = r_1^2 - (n - 1) dist^2`` so rounding
    does not accumulate over long runs.
    """
    if not (r1 > 0 and dist > 0):
        raise ValueError("radius and distance must be positive")
    d2 = dist * dist
    r12 = r1 * r1
    radii = [float(r1)]
    while radii[-1] >= dist:
        if len(radii) >= max_iter:
            return ShrinkResult(radii, len(radii), False)
        radii.append(math.sqrt(max(r12 - len(radii) * d2, 0.0)))
    return ShrinkResult(radii, len(radii), True)


@dataclass
class Certificate:
    certified: bool
    steps: int | None = None
    reason: str | None = None
    radii: list[float] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        if self.certified:
            return {"verdict": "certified", "steps": self.steps, "radii": self.radii}
        return {"verdict": "no_certificate", "reason": self.reason}


def injectivity_certificate(a, b, normal_a, normal_b, support_radius: float,
                            tol: float = 1e-10, max_iter: int = 100_000) -> Certificate:
    """Certify injectivity from an antipodal pair ``a``, ``b`` and a support radius about ``a``."""
    if not antipodal_check(normal_a, normal_b, a, b, tol):
        return Certificate(False, reason="orthogonality fails")
    dist = float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    res = shrink_iteration(support_radius, dist, max_iter)
    if not res.terminated:
        return Certificate(False, reason=f"shrink iteration did not finish in {max_iter} steps",
                           radii=res.radii)
    return Certificate(True, steps=res.steps, radii=res.radii)


# ---------------------------------------------------------------------------
# Coxeter closure


@dataclass(frozen=True, eq=False)
class ReflectionSystem:
    """Mirrors ``(point, unit normal)``; closure is only modeled when they share a point."""

    dim: int
    mirrors: tuple[tuple[np.ndarray, np.ndarray], ...]
    cap: int = 256

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        ms = []
        for p, n in self.mirrors:
            p = np.asarray(p, dtype=float)
            n = np.asarray(n, dtype=float)
            if p.shape != (self.dim,) or n.shape != (self.dim,):
                raise ValueError("mirror dimension mismatch")
            ms.append((p, n / np.linalg.norm(n)))
        if not ms:
            raise ValueError("need at least one mirror")
        object.__setattr__(self, "mirrors", tuple(ms))

    def common_point(self, tol: float = 1e-12) -> np.ndarray | None:
        N = np.array([n for _, n in self.mirrors])
        rhs = np.array([n @ p for p, n in self.mirrors])
        x, *_ = np.linalg.lstsq(N, rhs, rcond=None)
        return x if np.all(np.abs(N @ x - rhs) <= tol) else None


@dataclass
class ClosureResult:
    closed: bool
    normals: list[np.ndarray]
    point: np.ndarray | None
    cap: int
    reason: str | None = None

    @property
    def count(self) -> int:
        return len(self.normals)

    def to_json(self) -> dict:
        doc = {"closed": self.closed, "cap": self.cap, "count": self.count}
        if self.point is not None:
            doc["point"] = [float(v) for v in self.point]
        if self.closed:
            doc["mirrors"] = [
                {"point": [float(v) for v in self.point], "normal": [float(v) for v in n]}
                for n in self.normals
            ]
        if self.reason:
            doc["reason"] = self.reason
        return doc


def canonical_normal(n: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Representative of ``{n, -n}``: first clearly nonzero coordinate positive."""
    for v in n:
        if abs(v) > tol:
            return n if v > 0 else -n
    return n


def _same_line(n: np.ndarray, m: np.ndarray, tol: float) -> bool:
    return min(np.linalg.norm(n - m), np.linalg.norm(n + m)) <= tol


def coxeter_closure(sys: ReflectionSystem, tol: float = 1e-10) -> ClosureResult:
    """Close a concurrent mirror set under mutual reflections.

    A deterministic worklist reflects every mirror across every other one.
    Exceeding ``sys.cap`` mirrors reports divergence (the group is infinite,
    so the orbit is dense).
    """
    point = sys.common_point()
    if point is None:
        return ClosureResult(False, [], None, sys.cap, "out of modeled scope: mirrors are not concurrent")
    normals: list[np.ndarray] = []
    for _, n in sys.mirrors:
        if not any(_same_line(n, m, tol) for m in normals):
            normals.append(canonical_normal(n, tol))
    i = 0
    while i < len(normals):
        # reflect everything known so far across mirror i and mirror i across everything
        a = normals[i]
        for j in range(len(normals)):
            b = normals[j]
            for r in (b - 2.0 * (b @ a) * a, a - 2.0 * (a @ b) * b):
                r = r / np.linalg.norm(r)
                if not any(_same_line(r, m, tol) for m in normals):
                    normals.append(canonical_normal(r, tol))
                    if len(normals) > sys.cap:
                        return ClosureResult(False, normals, point, sys.cap,
                                             f"divergent: more than {sys.cap} mirrors")
        i += 1
    # a second full sweep confirms invariance
    for a, b in itertools.product(normals, repeat=2):
        r = b - 2.0 * (b @ a) * a
        if not any(_same_line(r / np.linalg.norm(r), m, tol) for m in normals):
            return ClosureResult(False, normals, point, sys.cap, "closure check failed")
    return ClosureResult(True, normals, point, sys.cap)


def line_system_2d(angles: Sequence[float], point=(0.0, 0.0)) -> ReflectionSystem:
    """Lines through ``point`` at the given angles (radians from the x1 axis)."""
    return ReflectionSystem(
        2, tuple((np.asarray(point, dtype=float), np.array([-math.sin(t), math.cos(t)])) for t in angles)
    )


# ---------------------------------------------------------------------------
# cone configurations


@dataclass(frozen=True)
class VertexOf:
    """The two cones meet exactly at the vertex of cone ``id``."""

    id: str

    def __str__(self) -> str:
        return f"vertex_of:{self.id}"


@dataclass(frozen=True)
class TransversalCurve:
    def __str__(self) -> str:
        return "transversal_curve"


@dataclass(frozen=True)
class Empty:
    def __str__(self) -> str:
        return "empty"


@dataclass(frozen=True)
class Cone3:
    id: str
    vertex: tuple[float, ...]


class ConfigError(ValueError):
    """The configuration is malformed (not merely invalid)."""


@dataclass(frozen=True, eq=False)
class ConeConfig:
    cones: tuple[Cone3, ...]
    intersections: Mapping[frozenset, object]

    def __post_init__(self):
        ids = [c.id for c in self.cones]
        if len(set(ids)) != len(ids):
            raise ConfigError("cone ids must be distinct")
        verts = [tuple(float(v) for v in c.vertex) for c in self.cones]
        if len(set(verts)) != len(verts):
            raise ConfigError("cone vertices must be distinct; merge cones sharing a vertex first")
        inter = {frozenset(k): v for k, v in self.intersections.items()}
        object.__setattr__(self, "intersections", inter)

    @property
    def P(self) -> int:
        return len(self.cones)


@dataclass(frozen=True)
class ConfigVerdict:
    valid: bool
    case: int | None = None
    rule: str | None = None

    def to_json(self) -> dict:
        return {"valid": True, "case": self.case} if self.valid else {"valid": False, "rule": self.rule}


RULE_DISJOINT = "disjoint cones: the union would be an injectivity set"
RULE_ONE_DIM = "intersections of distinct-vertex cones are 0-dimensional"
RULE_LABEL = "intersection must be the vertex of one of the two cones"
RULE_P = "P <= 3"
RULE_TWO_VERTICES = "no two vertices may lie on the third cone"


def validate_cone_configuration(cfg: ConeConfig) -> ConfigVerdict:
    """Check labeled pairwise intersections against the allowed configurations.

    Allowed: one cone; two cones meeting at one of their vertices; three
    cones whose vertex labels form a 3-cycle. Rules are checked in a fixed
    order and the first violation is reported.
    """
    ids = [c.id for c in cfg.cones]
    pairs = [frozenset(p) for p in itertools.combinations(ids, 2)]
    for p in pairs:
        if p not in cfg.intersections:
            raise ConfigError(f"missing intersection label for pair {sorted(p)}")
    for k in cfg.intersections:
        if k not in pairs:
            raise ConfigError(f"intersection label for unknown pair {sorted(k)}")
    labels = [cfg.intersections[p] for p in pairs]
    if any(isinstance(l, Empty) for l in labels):
        return ConfigVerdict(False, rule=RULE_DISJOINT)
    if any(isinstance(l, TransversalCurve) for l in labels):
        return ConfigVerdict(False, rule=RULE_ONE_DIM)
    for p, l in zip(pairs, labels):
        if not isinstance(l, VertexOf) or l.id not in p:
            return ConfigVerdict(False, rule=RULE_LABEL)
    if cfg.P >= 4:
        return ConfigVerdict(False, rule=RULE_P)
    if cfg.P == 3:
        # count vertices lying on each cone: b_i in C_j when pair {i, j} is labeled i
        on_cone = {i: 0 for i in ids}
        for p, l in zip(pairs, labels):
            (other,) = p - {l.id}
            on_cone[other] += 1
        if any(v >= 2 for v in on_cone.values()):
            return ConfigVerdict(False, rule=RULE_TWO_VERTICES)
    return ConfigVerdict(True, case=cfg.P)


def all_labelings(ids: Sequence[str], include_non_vertex: bool = True):
    """Every labeling of the pairs of ``ids`` (for exhaustive checks)."""
    pairs = list(itertools.combinations(ids, 2))
    options = []
    for i, j in pairs:
        opts = [VertexOf(i), VertexOf(j)]
        if include_non_vertex:
            opts += [TransversalCurve(), Empty()]
        options.append(opts)
    for choice in itertools.product(*options):
        yield {frozenset(p): l for p, l in zip(pairs, choice)}


def is_cyclic_pattern(ids: Sequence[str], labels: Mapping[frozenset, object]) -> bool:
    """The two allowed three-cone patterns: every vertex lies on exactly one other cone."""
    a, b, c = ids
    pat1 = {frozenset((a, b)): VertexOf(a), frozenset((b, c)): VertexOf(b), frozenset((c, a)): VertexOf(c)}
    pat2 = {frozenset((a, b)): VertexOf(b), frozenset((b, c)): VertexOf(c), frozenset((c, a)): VertexOf(a)}
    return dict(labels) in (pat1, pat2)
