"""Command-line front end: JSON in, JSON (and CSV) out.

Exit status: 0 when the check succeeds (verified, valid, certified, closed,
or a decisive classification), 1 when it fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance
from .generators import (DiscreteMeasure, OddPlane, RadialHarmonic, plane_wave_eigenfunction,
                         sample_zero_set, spectral_projection_discrete)
from .io import (MalformedInput, dump_json, field, load_json, parse_chart, parse_function, parse_measure,
                 rational, real, vector, vectors)
from .moments import check_recursion, common_zero_sample, harmonic_minor
from .polynomials import Poly
from .ruled import Inconclusive, classify_singularity
from .spherical_means import default_radii, sphere_rule, verify_zero_means, write_means_csv
from .symmetry import ReflectionSystem, coxeter_closure, injectivity_certificate

COMMANDS = ("verify-cone", "classify", "moments", "coxeter", "certify", "spectral", "acceptance")


@dataclass
class RunConfig:
    command: str
    input: Path | None
    output: Path | None
    tol: float
    quad_order: int
    series_order: int | None
    seed: int
    max_iter: int | None
    criteria: tuple[int, ...] = ()

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command}")
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.quad_order < 1 or (self.series_order is not None and self.series_order < 1):
            raise ValueError("orders must be at least 1")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("--max-iter must be at least 1")


def _out(cfg: RunConfig, name: str) -> Path | None:
    if cfg.output is None:
        return None
    cfg.output.mkdir(parents=True, exist_ok=True)
    return cfg.output / name


def _emit(cfg: RunConfig, doc: dict) -> None:
    text = dump_json(doc, _out(cfg, f"{cfg.command}.json"))
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _centers(spec, f, path: str, rng) -> np.ndarray:
    if isinstance(spec, list):
        return np.array(vectors(spec, path, f.dim), dtype=float).reshape(-1, f.dim)
    kind = field(spec, "sample", path, str)
    count = field(spec, "count", path, int)
    max_norm = real(field(spec, "max_norm", path), f"{path}.max_norm")
    if kind == "zero_set":
        if not isinstance(f, RadialHarmonic):
            raise MalformedInput(f"{path}.sample", "zero_set sampling needs a radial_harmonic function")
        return sample_zero_set(f.h, count, max_norm, rng, center=f.center)
    if kind == "plane":
        if not isinstance(f, OddPlane):
            raise MalformedInput(f"{path}.sample", "plane sampling needs an odd_plane function")
        basis = np.linalg.svd(f.normal[None, :])[2][1:]
        coef = rng.uniform(-max_norm, max_norm, size=(count, f.dim - 1))
        return f.point + coef @ basis
    raise MalformedInput(f"{path}.sample", f"unknown sampler {kind!r}")


def cmd_verify_cone(cfg: RunConfig, doc) -> int:
    f = parse_function(field(doc, "function", "$"), "$.function")
    if isinstance(f, DiscreteMeasure):
        raise MalformedInput("$.function.kind", "spherical means need an evaluable function")
    rng = np.random.default_rng(cfg.seed)
    centers = _centers(field(doc, "centers", "$"), f, "$.centers", rng)
    radii_spec = field(doc, "radii", "$")
    if isinstance(radii_spec, list):
        radii = np.array(vector(radii_spec, "$.radii"))
        if np.any(radii <= 0):
            raise MalformedInput("$.radii", "radii must be positive")
    else:
        radii = default_radii(field(radii_spec, "count", "$.radii", int),
                              real(field(radii_spec, "max", "$.radii"), "$.radii.max"))
    rule = sphere_rule(f.dim, cfg.quad_order)
    sup = f.sup_estimate(seed=cfg.seed)
    rep = verify_zero_means(f, centers, radii, rule)
    verified = rep.max_abs <= cfg.tol * sup
    summary = {
        "command": cfg.command,
        "quad_order": cfg.quad_order,
        "tol": cfg.tol,
        "sup_estimate": sup,
        "relative_max": rep.max_abs / sup if sup else None,
        "report": rep.to_json(),
        "verified": bool(verified),
    }
    csv_path = _out(cfg, "means.csv")
    if csv_path is not None:
        write_means_csv(csv_path, centers, radii, rep.means)
        summary["csv"] = csv_path.name
    if "control" in doc:
        ctrl_centers = np.array(vectors(doc["control"], "$.control", f.dim), dtype=float)
        ctrl = verify_zero_means(f, ctrl_centers, radii, rule)
        summary["control"] = {"report": ctrl.to_json(), "relative_max": ctrl.max_abs / sup,
                              "nonzero": bool(ctrl.max_abs >= 1e-3 * sup)}
        verified = verified and ctrl.max_abs >= 1e-3 * sup
        summary["verified"] = bool(verified)
    _emit(cfg, summary)
    return 0 if verified else 1


def cmd_classify(cfg: RunConfig, doc) -> int:
    chart_doc = doc.get("chart", doc) if isinstance(doc, dict) else doc
    path = "$.chart" if isinstance(doc, dict) and "chart" in doc else "$"
    chart = parse_chart(chart_doc, path, cfg.series_order)
    t0 = rational(doc.get("t0", 0), "$.t0") if isinstance(doc, dict) else Fraction(0)
    lam = doc.get("lambda0") if isinstance(doc, dict) else None
    lam = None if lam is None else rational(lam, "$.lambda0")
    verdict = classify_singularity(chart, t0, lam)
    out = verdict.to_json()
    out["command"] = cfg.command
    _emit(cfg, out)
    return 1 if isinstance(verdict, Inconclusive) else 0


def cmd_moments(cfg: RunConfig, doc) -> int:
    mdoc = doc.get("measure", doc)
    mu = parse_measure(mdoc, "$.measure" if "measure" in doc else "$")
    dim = mu.dim if mu.points else field(doc, "dim", "$", int)
    K = field(doc, "K", "$", int, default=8)
    if K < 1:
        raise MalformedInput("$.K", "must be at least 1")
    minor = harmonic_minor(mu, K, dim)
    out = {
        "command": cfg.command,
        "K": K,
        "recursion_holds": check_recursion(mu, K, dim),
        "k0": None if minor is None else minor[0],
        "H": None if minor is None else minor[1].to_json(),
        "H_text": None if minor is None else str(minor[1]),
    }
    if "grid" in doc:
        grid = np.array(vectors(doc["grid"], "$.grid", dim), dtype=float).reshape(-1, dim)
        zeros = common_zero_sample(mu, K, grid, cfg.tol, dim)
        out["zeros_count"] = int(len(zeros))
        out["note"] = f"common zeros of Q_0..Q_{K} on the supplied grid"
        zpath = _out(cfg, "zeros.csv")
        if zpath is not None:
            with open(zpath, "w") as fh:
                fh.write(",".join(["x1", "x2", "x3"][:dim]) + "\n")
                for z in zeros:
                    fh.write(",".join(repr(float(v)) for v in z) + "\n")
            out["zeros"] = zpath.name
    _emit(cfg, out)
    return 0 if out["recursion_holds"] else 1


def cmd_coxeter(cfg: RunConfig, doc) -> int:
    dim = field(doc, "dim", "$", int)
    mirrors = []
    for i, m in enumerate(field(doc, "mirrors", "$", list)):
        p = f"$.mirrors[{i}]"
        point = vector(field(m, "point", p), f"{p}.point", dim)
        normal = vector(field(m, "normal", p), f"{p}.normal", dim)
        if not any(normal):
            raise MalformedInput(f"{p}.normal", "zero vector")
        mirrors.append((point, normal))
    if not mirrors:
        raise MalformedInput("$.mirrors", "need at least one mirror")
    cap = cfg.max_iter or field(doc, "cap", "$", int, default=256)
    try:
        system = ReflectionSystem(dim, tuple(mirrors), cap)
    except ValueError as exc:
        raise MalformedInput("$", str(exc)) from None
    res = coxeter_closure(system)
    out = res.to_json()
    out["command"] = cfg.command
    _emit(cfg, out)
    return 0 if res.closed else 1


def cmd_certify(cfg: RunConfig, doc) -> int:
    a = vector(field(doc, "a", "$"), "$.a")
    b = vector(field(doc, "b", "$"), "$.b", len(a))
    na = vector(field(doc, "normal_a", "$"), "$.normal_a", len(a))
    nb = vector(field(doc, "normal_b", "$"), "$.normal_b", len(a))
    radius = real(field(doc, "support_radius", "$"), "$.support_radius")
    if not radius > 0:
        raise MalformedInput("$.support_radius", "must be positive")
    if a == b:
        raise MalformedInput("$.b", "points must differ")
    cert = injectivity_certificate(a, b, na, nb, radius, tol=cfg.tol,
                                   max_iter=cfg.max_iter or 100_000)
    out = cert.to_json()
    out["command"] = cfg.command
    _emit(cfg, out)
    return 0 if cert.certified else 1


def _lambdas(spec, path: str) -> np.ndarray:
    if isinstance(spec, list):
        return np.array(vector(spec, path))
    start = real(field(spec, "start", path), f"{path}.start")
    stop = real(field(spec, "stop", path), f"{path}.stop")
    step = real(field(spec, "step", path), f"{path}.step")
    if not step > 0:
        raise MalformedInput(f"{path}.step", "must be positive")
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def cmd_spectral(cfg: RunConfig, doc) -> int:
    src = parse_function(field(doc, "source", "$"), "$.source")
    lams = _lambdas(field(doc, "lambdas", "$"), "$.lambdas")
    dim = src.dim
    if isinstance(src, DiscreteMeasure):
        pts = vectors(field(doc, "points", "$"), "$.points", dim, exact=True)
        values = [[abs(spectral_projection_discrete(src, lam, p)) for lam in lams] for p in pts]
    elif isinstance(src, RadialHarmonic):
        pts = vectors(field(doc, "points", "$"), "$.points", dim)
        rule = sphere_rule(dim, cfg.quad_order)
        shifted = np.array(pts, dtype=float) - src.center
        values = [[abs(plane_wave_eigenfunction(src.h, lam, x, rule)) for lam in lams] for x in shifted]
    else:
        raise MalformedInput("$.source.kind", "spectral needs a discrete or radial_harmonic source")
    worst = max((max(row) for row in values), default=0.0)
    out = {
        "command": cfg.command,
        "max_abs": worst,
        "tol": cfg.tol,
        "points": len(values),
        "lambdas": len(lams),
        "vanishes": bool(worst <= cfg.tol),
    }
    _emit(cfg, out)
    return 0 if worst <= cfg.tol else 1


def cmd_acceptance(cfg: RunConfig, doc) -> int:
    only = list(cfg.criteria) or None
    if doc is not None:
        only = [int(k) for k in field(doc, "criteria", "$", list)]
    unknown = sorted(set(only or ()) - set(acceptance.RUNNERS))
    if unknown:
        raise MalformedInput("$.criteria", f"no such criterion: {unknown}")
    results = acceptance.run_all(only)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    path = _out(cfg, "acceptance.json")
    if path is not None:
        dump_json({"criteria": [r.to_json() for r in results]}, path)
    return 0 if all(r.passed for r in results) else 1


HANDLERS = {
    "verify-cone": cmd_verify_cone,
    "classify": cmd_classify,
    "moments": cmd_moments,
    "coxeter": cmd_coxeter,
    "certify": cmd_certify,
    "spectral": cmd_spectral,
    "acceptance": cmd_acceptance,
}


def run(cfg: RunConfig) -> int:
    try:
        doc = load_json(cfg.input) if cfg.input is not None else None
        if doc is None and cfg.command != "acceptance":
            raise MalformedInput("$", "--input is required")
        return HANDLERS[cfg.command](cfg, doc)
    except MalformedInput as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphermean", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", type=Path, help="JSON input file")
    parser.add_argument("--output", type=Path, help="directory for JSON/CSV reports")
    parser.add_argument("--tol", type=float, default=None,
                        help="tolerance (default 1e-6 relative for verify-cone, 1e-8 spectral, 1e-10 otherwise)")
    parser.add_argument("--quad-order", type=int, default=64, help="sphere rule order (default 64)")
    parser.add_argument("--series-order", type=int, default=None,
                        help="truncation order for charts (default: the order in the input)")
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled centers")
    parser.add_argument("--max-iter", type=int, default=None,
                        help="iteration cap for certify, mirror cap for coxeter")
    parser.add_argument("--criterion", type=int, action="append", default=[],
                        help="acceptance only: run just this criterion (repeatable)")
    return parser


DEFAULT_TOL = {"verify-cone": 1e-6, "spectral": 1e-8, "moments": 1e-10}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else DEFAULT_TOL.get(args.command, 1e-10)
    try:
        cfg = RunConfig(args.command, args.input, args.output, tol, args.quad_order,
                        args.series_order, args.seed, args.max_iter, tuple(args.criterion))
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
