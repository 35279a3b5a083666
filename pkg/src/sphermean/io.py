"""JSON schemas for sources, measures, charts and mirror systems.

Rationals are written as strings (``"3/4"``, ``"-2"``) so that nothing is
lost in transit; plain JSON numbers are accepted wherever a float suffices.
Parse failures raise :class:`MalformedInput` carrying a JSON path such as
``$.function.h.terms[2].exp``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .generators import BumpSpec, CompactFunction, DiscreteMeasure, GridSample, OddPlane, RadialHarmonic
from .polynomials import Poly
from .ruled.charts import RuledChart, make_chart
from .series import VecSeries


class MalformedInput(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def load_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput("$", f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise MalformedInput("$", f"cannot read input: {exc.strerror}") from exc


def dump_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def field(doc, key: str, path: str, kind=None, default=...):
    if not isinstance(doc, dict):
        raise MalformedInput(path, "expected an object")
    if key not in doc:
        if default is not ...:
            return default
        raise MalformedInput(f"{path}.{key}", "missing field")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise MalformedInput(f"{path}.{key}", f"expected {names}")
    return value


def rational(value, path: str) -> Fraction:
    if isinstance(value, bool):
        raise MalformedInput(path, "expected a rational")
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedInput(path, f"not a rational number: {value!r}") from None


def real(value, path: str) -> float:
    if isinstance(value, bool):
        raise MalformedInput(path, "expected a number")
    try:
        return float(Fraction(str(value))) if isinstance(value, str) else float(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise MalformedInput(path, f"not a number: {value!r}") from None


def vector(value, path: str, dim: int | None = None, exact: bool = False) -> list:
    if not isinstance(value, list):
        raise MalformedInput(path, "expected an array")
    if dim is not None and len(value) != dim:
        raise MalformedInput(path, f"expected {dim} entries, got {len(value)}")
    conv = rational if exact else real
    return [conv(v, f"{path}[{i}]") for i, v in enumerate(value)]


def vectors(value, path: str, dim: int | None = None, exact: bool = False) -> list[list]:
    if not isinstance(value, list):
        raise MalformedInput(path, "expected an array of vectors")
    out = [vector(v, f"{path}[{i}]", dim, exact) for i, v in enumerate(value)]
    if dim is None and out and len({len(v) for v in out}) > 1:
        raise MalformedInput(path, "vectors have mixed lengths")
    return out


# ---------------------------------------------------------------------------
# polynomials


def parse_poly(doc, path: str = "$") -> Poly:
    dim = field(doc, "dim", path, int)
    if dim < 1:
        raise MalformedInput(f"{path}.dim", "must be positive")
    terms = field(doc, "terms", path, list)
    out: dict[tuple[int, ...], Fraction] = {}
    for i, t in enumerate(terms):
        tp = f"{path}.terms[{i}]"
        exp = field(t, "exp", tp, list)
        if len(exp) != dim or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 0 for k in exp):
            raise MalformedInput(f"{tp}.exp", f"expected {dim} nonnegative integers")
        num = rational(field(t, "num", tp), f"{tp}.num")
        den = rational(field(t, "den", tp, default="1"), f"{tp}.den")
        if den == 0:
            raise MalformedInput(f"{tp}.den", "zero denominator")
        if tuple(exp) in out:
            raise MalformedInput(f"{tp}.exp", "duplicate exponent")
        out[tuple(exp)] = num / den
    return Poly(dim, out)


# ---------------------------------------------------------------------------
# sources


def parse_function(doc, path: str = "$") -> CompactFunction | DiscreteMeasure:
    kind = field(doc, "kind", path, str)
    if kind == "radial_harmonic":
        bump = field(doc, "bump", path, dict)
        alpha_path = f"{path}.bump"
        try:
            alpha = BumpSpec(real(field(bump, "r_in", alpha_path), f"{alpha_path}.r_in"),
                             real(field(bump, "r_out", alpha_path), f"{alpha_path}.r_out"))
        except ValueError as exc:
            if isinstance(exc, MalformedInput):
                raise
            raise MalformedInput(alpha_path, str(exc)) from None
        h = parse_poly(field(doc, "h", path), f"{path}.h")
        center = doc.get("center")
        if center is not None:
            center = vector(center, f"{path}.center", h.dim)
        try:
            return RadialHarmonic(alpha, h, center)
        except ValueError as exc:
            raise MalformedInput(f"{path}.h", str(exc)) from None
    if kind == "odd_plane":
        point = vector(field(doc, "point", path), f"{path}.point")
        normal = vector(field(doc, "normal", path), f"{path}.normal", len(point))
        profile = parse_function(field(doc, "profile", path), f"{path}.profile")
        if isinstance(profile, DiscreteMeasure):
            raise MalformedInput(f"{path}.profile", "profile must be evaluable")
        nrm = float(np.linalg.norm(normal))
        if nrm == 0:
            raise MalformedInput(f"{path}.normal", "zero vector")
        try:
            return OddPlane(np.array(point), np.array(normal) / nrm, profile)
        except ValueError as exc:
            raise MalformedInput(path, str(exc)) from None
    if kind == "grid":
        field(doc, "values", path, list)
        try:
            values = np.asarray(field(doc, "values", path), dtype=float)
        except (TypeError, ValueError):
            raise MalformedInput(f"{path}.values", "expected a rectangular numeric array") from None
        if values.ndim not in (2, 3):
            raise MalformedInput(f"{path}.values", "grid must be 2- or 3-dimensional")
        origin = vector(field(doc, "origin", path), f"{path}.origin", values.ndim)
        spacing = field(doc, "spacing", path)
        spacing = vector(spacing, f"{path}.spacing", values.ndim) if isinstance(spacing, list) \
            else real(spacing, f"{path}.spacing")
        try:
            return GridSample(np.array(origin), spacing, values)
        except ValueError as exc:
            raise MalformedInput(path, str(exc)) from None
    if kind == "discrete":
        return parse_measure(doc, path)
    raise MalformedInput(f"{path}.kind", f"unknown kind {kind!r}")


def parse_measure(doc, path: str = "$") -> DiscreteMeasure:
    pts = vectors(field(doc, "points", path), f"{path}.points", exact=True)
    ws = field(doc, "weights", path, list)
    weights = [rational(w, f"{path}.weights[{i}]") for i, w in enumerate(ws)]
    if len(weights) != len(pts):
        raise MalformedInput(f"{path}.weights", "one weight per point required")
    try:
        return DiscreteMeasure(tuple(map(tuple, pts)), tuple(weights))
    except ValueError as exc:
        raise MalformedInput(path, str(exc)) from None


def function_to_json(f) -> dict:
    if isinstance(f, RadialHarmonic):
        doc = {"kind": "radial_harmonic", "bump": {"r_in": f.alpha.r_in, "r_out": f.alpha.r_out},
               "h": f.h.to_json()}
        if np.any(f.center):
            doc["center"] = [float(v) for v in f.center]
        return doc
    if isinstance(f, OddPlane):
        return {"kind": "odd_plane", "point": [float(v) for v in f.point],
                "normal": [float(v) for v in f.normal], "profile": function_to_json(f.profile)}
    if isinstance(f, GridSample):
        return {"kind": "grid", "origin": [float(v) for v in f.origin],
                "spacing": [float(v) for v in f.spacing], "values": f.values.tolist()}
    if isinstance(f, DiscreteMeasure):
        return {"kind": "discrete", "points": [[str(c) for c in p] for p in f.points],
                "weights": [str(w) for w in f.weights]}
    raise TypeError(f"cannot serialize {type(f).__name__}")


# ---------------------------------------------------------------------------
# charts


def parse_chart(doc, path: str = "$", order: int | None = None) -> RuledChart:
    """Chart from ``{"order", "u", "e"}``.

    The listed coefficients are taken as exact polynomial data (missing ones
    are zero); ``order`` overrides the declared truncation order, and ``e``
    is normalized exactly when it is not already a unit series.
    """
    declared = field(doc, "order", path, int)
    if order is None:
        order = declared
    if order < 1:
        raise MalformedInput(f"{path}.order", "must be at least 1")
    u = vectors(field(doc, "u", path), f"{path}.u", 3, exact=True)
    e = vectors(field(doc, "e", path), f"{path}.e", 3, exact=True)
    if not u or not e:
        raise MalformedInput(path, "u and e need at least one coefficient")
    try:
        return make_chart(VecSeries.from_coeffs(u, order), VecSeries.from_coeffs(e, order))
    except ValueError as exc:
        raise MalformedInput(f"{path}.e", str(exc)) from None


def chart_to_json(chart: RuledChart) -> dict:
    return chart.to_json()
