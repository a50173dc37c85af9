"""Command-line front end: ``manispline {solve,eval,convergence,audit,lattice}``.

Configs are JSON, validated against the schemas below before any work is
done. Exit codes: 0 ok, 1 audit failure, 2 user error, 3 singular Gram.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import harness
from .functionals import (
    Functional,
    arc,
    dirac,
    great_circle,
    hemisphere,
    hemisphere_odd,
    total_integral,
    transform_data,
)
from .lattices import (
    PointSet,
    farthest_point_sample,
    fibonacci_sphere,
    point_set,
    symmetrize,
    uniform_circle,
    validate_rho_lattice,
)
from .spectrum import SPHERE2, Manifold, SpectralIndex, as_points, quadrature_rule
from .spline import (
    SingularGramError,
    Spline,
    SplineError,
    SplineProblem,
    evaluate_spline,
    solve_spline,
    sobolev_norm,
)

FORMAT_VERSION = 1
EVAL_HEADER = "# manispline eval v1"

EXIT_OK, EXIT_AUDIT, EXIT_USER, EXIT_SINGULAR = 0, 1, 2, 3


class UsageError(Exception):
    """Bad config or input file; maps to exit code 2."""


# -- schemas ------------------------------------------------------------------------

_NUM = {"type": "number"}
_POINT = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}]}
_MANIFOLD = {"enum": ["circle", "sphere2"]}

_LATTICE = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["uniform", "fps", "fibonacci", "points"]},
        "n": {"type": "integer", "minimum": 1},
        "points": {"type": "array", "items": _POINT},
        "symmetrize": {"type": "boolean"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_TARGET = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "coefficients": {"type": "array", "items": _NUM, "minItems": 1},
        "random": {
            "type": "object",
            "properties": {
                "degrees": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "seed": {"type": "integer"},
            },
            "required": ["degrees"],
            "additionalProperties": False,
        },
        "eigenfunction": {
            "type": "object",
            "properties": {
                "degree": {"type": "integer", "minimum": 0},
                "order": {"type": "integer", "minimum": 1},
            },
            "required": ["degree", "order"],
            "additionalProperties": False,
        },
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}

_FUNCTIONAL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["dirac", "hemisphere", "hemisphere_odd", "great_circle", "arc", "total_integral"]},
        "point": _POINT,
        "pole": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "a": _NUM,
        "b": _NUM,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_TRUNCATION = {
    "degree": {"type": "integer", "minimum": 0},
    "tail_tol": {"type": "number", "exclusiveMinimum": 0},
    "closed_form": {"type": "boolean"},
    "max_degree": {"type": "integer", "minimum": 0},
}

_PROBLEM = {
    "manifold": _MANIFOLD,
    "smoothness": _NUM,
    **_TRUNCATION,
    "functionals": {"type": "array", "items": _FUNCTIONAL, "minItems": 1},
    "family": {
        "type": "object",
        "properties": {
            "kind": {"enum": ["dirac", "hemisphere", "great_circle"]},
            "lattice": _LATTICE,
        },
        "required": ["kind", "lattice"],
        "additionalProperties": False,
    },
    "values": {"type": "array", "items": _NUM},
    "target": _TARGET,
    "solver": {"enum": ["auto", "cholesky", "qr"]},
    "jitter": {"type": "boolean"},
    "seed": {"type": "integer"},
}

SOLVE_SCHEMA = {
    "type": "object",
    "properties": _PROBLEM,
    "required": ["manifold", "smoothness"],
    "oneOf": [{"required": ["functionals"]}, {"required": ["family"]}],
    "additionalProperties": False,
}

EVAL_SCHEMA = {
    "type": "object",
    "properties": {
        "points": {"type": "array", "items": _POINT},
        "uniform": {"type": "integer", "minimum": 0},
        "fibonacci": {"type": "integer", "minimum": 0},
        "quadrature": {"type": "integer", "minimum": 0},
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}

CONVERGENCE_SCHEMA = {
    "type": "object",
    "properties": {
        "manifold": _MANIFOLD,
        "family": {"enum": ["dirac", "hemisphere", "great_circle"]},
        "target": _TARGET,
        "t_base": _NUM,
        "mode": {"enum": ["refine_density", "raise_order"]},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "orders": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "schedule_m": {"type": "integer", "minimum": 0},
        "lattice": {"enum": ["uniform", "fps"]},
        "points": _LATTICE,
        "error_norms": {"type": "array", "items": {"enum": ["L2", "Linf", "C1", "C2"]}, "minItems": 1},
        "degree": {"type": "integer", "minimum": 0},
        "tail_tol": {"type": "number", "exclusiveMinimum": 0},
        "eval_resolution": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
    "required": ["manifold", "family", "target", "t_base", "mode"],
    "additionalProperties": False,
}

AUDIT_SCHEMAS = {
    "optimality": {
        "type": "object",
        "properties": {
            **_PROBLEM,
            "trials": {"type": "integer", "minimum": 1},
            "band": {"type": "integer", "minimum": 0},
            "scale": {"type": "number", "minimum": 0},
        },
        "required": ["manifold", "smoothness"],
        "oneOf": [{"required": ["functionals"]}, {"required": ["family"]}],
        "additionalProperties": False,
    },
    "multiplier": {
        "type": "object",
        "properties": {
            "max_degree": {"type": "integer", "minimum": 1},
            "d": {"type": "integer"},
            "quad_degree": {"type": "integer", "minimum": 1},
        },
        "additionalProperties": False,
    },
    "transform": {
        "type": "object",
        "properties": {
            "target": _TARGET,
            "lattice": _LATTICE,
            "smoothness": _NUM,
            "degree": {"type": "integer", "minimum": 0},
            "grid_resolution": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer"},
        },
        "required": ["target", "lattice", "smoothness", "degree"],
        "additionalProperties": False,
    },
}

LATTICE_SCHEMA = {
    "type": "object",
    "properties": {
        "manifold": _MANIFOLD,
        **_LATTICE["properties"],
        "rho": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
    },
    "required": ["manifold", "kind"],
    "additionalProperties": False,
}

_SPLINE_SCHEMA = {
    "type": "object",
    "properties": {
        "format": {"const": "manispline-spline"},
        "version": {"type": "integer"},
        "manifold": _MANIFOLD,
        "t": _NUM,
        "J": {"type": ["integer", "null"]},
        "solver": {"enum": ["cholesky", "qr", "closed_form"]},
        "alpha": {"type": "array", "items": _NUM},
        "values": {"type": "array", "items": _NUM},
        "functionals": {"type": "array", "items": _FUNCTIONAL, "minItems": 1},
        "fourier": {"type": "array", "items": _NUM},
        "tail_tol": {"type": ["number", "null"]},
        "closed_form": {"type": "boolean"},
        "condition_estimate": {"type": ["number", "null"]},
        "sobolev_norm": {"type": ["number", "null"]},
        "residual_max": {"type": ["number", "null"]},
    },
    "required": ["format", "version", "manifold", "t", "J", "solver", "alpha", "values", "functionals"],
    "additionalProperties": False,
}


# -- io -------------------------------------------------------------------------------


def _validate(doc, schema, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"invalid {what} at {where}: {exc.message}") from None


def _load_json(path: str | None, what: str):
    if path is None:
        raise UsageError(f"--config is required for {what}")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def dumps(doc) -> str:
    return json.dumps(_clean(doc), indent=1, allow_nan=False) + "\n"


def write_atomic(path: str | None, text: str) -> None:
    """Write via a temp file in the target directory and ``os.replace``."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def resolve_threads(flag: int | None) -> int:
    """``--threads``, then ``MANISPLINE_THREADS``, else 1; 0 means all cores."""
    n = flag
    if n is None:
        env = os.environ.get("MANISPLINE_THREADS")
        if env:
            try:
                n = int(env)
            except ValueError:
                raise UsageError(f"MANISPLINE_THREADS must be an integer, got {env!r}") from None
    if n is None:
        return 1
    if n < 0:
        raise UsageError("thread count must be >= 0")
    return n or (os.cpu_count() or 1)


# -- config → objects -------------------------------------------------------------------------


def _manifold(name: str) -> Manifold:
    return Manifold.from_name(name)


def build_target(M: Manifold, doc: dict, seed: int) -> harness.TargetFunction:
    if "name" in doc:
        return harness.TargetFunction.named(M, doc["name"])
    if "coefficients" in doc:
        return harness.TargetFunction.band_limited(M, doc["coefficients"])
    if "eigenfunction" in doc:
        e = doc["eigenfunction"]
        return harness.TargetFunction.eigenfunction(M, SpectralIndex(e["degree"], e["order"]))
    r = doc["random"]
    c = harness.random_coefficients(M, r["degrees"], r.get("seed", seed))
    return harness.TargetFunction.band_limited(M, c, "random")


def build_lattice(M: Manifold, doc: dict, seed: int) -> PointSet:
    kind = doc["kind"]
    if kind == "points":
        if "points" not in doc:
            raise UsageError("lattice kind 'points' needs a points list")
        ps = point_set(M, doc["points"])
    else:
        if "n" not in doc:
            raise UsageError(f"lattice kind {kind!r} needs n")
        n = doc["n"]
        if kind == "uniform":
            if not M.is_circle:
                raise UsageError("uniform lattices exist on the circle only")
            ps = uniform_circle(n)
        elif kind == "fibonacci":
            if M.is_circle:
                raise UsageError("fibonacci lattices exist on the sphere only")
            ps = point_set(M, fibonacci_sphere(n))
        else:
            ps = farthest_point_sample(M, n, seed)
    return symmetrize(ps) if doc.get("symmetrize") else ps


def build_functional(M: Manifold, doc: dict) -> Functional:
    kind = doc["kind"]
    try:
        if kind == "dirac":
            return dirac(M, doc["point"])
        if kind == "total_integral":
            return total_integral(M)
        if kind == "arc":
            if not M.is_circle:
                raise UsageError("arc functionals live on the circle")
            return arc(doc["a"], doc["b"])
        if M.is_circle:
            raise UsageError(f"{kind} functionals live on the sphere")
        ctor = {"hemisphere": hemisphere, "hemisphere_odd": hemisphere_odd, "great_circle": great_circle}
        return ctor[kind](doc["pole"])
    except KeyError as exc:
        raise UsageError(f"{kind} functional is missing {exc.args[0]!r}") from None


def build_problem(doc: dict, seed: int) -> SplineProblem:
    M = _manifold(doc["manifold"])
    seed = doc.get("seed", seed)
    target = build_target(M, doc["target"], seed) if "target" in doc else None
    if ("values" in doc) == (target is not None):
        raise UsageError("give exactly one of values or target")
    if "functionals" in doc:
        fams = [build_functional(M, f) for f in doc["functionals"]]
        values = doc["values"] if target is None else [target.functional_value(F) for F in fams]
    else:
        fam = doc["family"]
        ps = build_lattice(M, fam["lattice"], seed)
        fams = harness.build_family(M, fam["kind"], ps.points)
        if target is not None:
            values = [target.functional_value(F) for F in fams]
        elif fam["kind"] == "dirac":
            values = doc["values"]
        else:
            # values are given per lattice point; reduce them like the family
            values = transform_data(fam["kind"], ps.points, doc["values"])
    return SplineProblem(
        M,
        doc["smoothness"],
        tuple(fams),
        values,
        degree=doc.get("degree"),
        tail_tol=doc.get("tail_tol"),
        closed_form=doc.get("closed_form", False),
        jitter=doc.get("jitter", False),
        max_degree=doc.get("max_degree"),
    )


# -- spline artifact -----------------------------------------------------------------


def spline_to_dict(s: Spline) -> dict:
    p = s.problem
    out = {
        "format": "manispline-spline",
        "version": FORMAT_VERSION,
        "manifold": p.manifold.kind,
        "t": p.smoothness,
        "J": s.degree,
        "solver": s.solver,
        "alpha": s.alpha,
        "values": p.v,
        "functionals": [F.describe() for F in p.functionals],
        "tail_tol": p.tail_tol,
        "closed_form": p.closed_form,
        "condition_estimate": s.gram.condition_estimate if s.gram is not None else None,
        "sobolev_norm": sobolev_norm(s),
        "residual_max": s.residual_max,
    }
    if s.qr_fourier is not None:
        out["fourier"] = s.qr_fourier
    return out


def _functional_from_record(M: Manifold, rec: dict) -> Functional:
    # stored poles are already normalized; rebuild without touching the bits
    kind = rec["kind"]
    if kind == "dirac":
        pole = float(rec["point"]) if M.is_circle else tuple(float(v) for v in rec["point"])
        return Functional(kind, M, pole=pole, sobolev_order=M.dim / 2 + 0.25)
    if kind == "arc":
        return Functional(kind, M, interval=(float(rec["a"]), float(rec["b"])))
    if kind == "total_integral":
        return Functional(kind, M)
    return Functional(kind, M, pole=tuple(float(v) for v in rec["pole"]))


def spline_from_dict(doc: dict) -> Spline:
    if doc.get("version") != FORMAT_VERSION or doc.get("format") != "manispline-spline":
        raise UsageError(f"unsupported spline file version {doc.get('version')!r}")
    _validate(doc, _SPLINE_SCHEMA, "spline file")
    M = _manifold(doc["manifold"])
    fams = tuple(_functional_from_record(M, r) for r in doc["functionals"])
    if len(doc["alpha"]) != len(fams):
        raise UsageError("alpha and functionals differ in length")
    problem = SplineProblem(
        M,
        doc["t"],
        fams,
        doc["values"],
        degree=doc["J"],
        tail_tol=doc.get("tail_tol"),
        closed_form=doc.get("closed_form", False),
    )
    alpha = np.asarray(doc["alpha"], dtype=float)
    fourier = None
    if doc["solver"] == "qr":
        if "fourier" not in doc:
            raise UsageError("qr spline file lacks fourier coefficients")
        fourier = np.asarray(doc["fourier"], dtype=float)
    norm = doc.get("sobolev_norm")
    norm_sq = float(alpha @ problem.v) if norm is None else norm * norm
    return Spline(problem, alpha, None, doc["solver"], norm_sq, doc["J"], fourier)


def eval_grid(M: Manifold, doc: dict) -> np.ndarray:
    if "points" in doc:
        pts = doc["points"]
        if not pts:
            return np.zeros(0) if M.is_circle else np.zeros((0, 3))
        return as_points(M, pts)
    if "uniform" in doc:
        if not M.is_circle:
            raise UsageError("uniform grids exist on the circle only")
        n = doc["uniform"]
        return 2 * np.pi * np.arange(n) / max(n, 1)
    if M.is_circle:
        raise UsageError("sphere grids need manifold sphere2")
    if "fibonacci" in doc:
        return fibonacci_sphere(doc["fibonacci"])
    return quadrature_rule(M, doc["quadrature"]).nodes


def eval_csv(s: Spline, pts: np.ndarray) -> str:
    M = s.problem.manifold
    lines = [EVAL_HEADER, "theta,value" if M.is_circle else "x,y,z,value"]
    if len(pts):
        vals = evaluate_spline(s, pts)
        for p, v in zip(pts, vals):
            coords = [p] if M.is_circle else list(p)
            lines.append(",".join(repr(float(c)) for c in coords) + "," + repr(float(v)))
    return "\n".join(lines) + "\n"


def read_eval_csv(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or lines[0] != EVAL_HEADER:
        raise UsageError("not a manispline eval v1 file")
    rows = [ln.split(",") for ln in lines[2:] if ln]
    return np.array([[float(x) for x in r] for r in rows])


# -- commands ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    doc = _load_json(args.config, "solve")
    _validate(doc, SOLVE_SCHEMA, "solve config")
    problem = build_problem(doc, args.seed)
    s = solve_spline(problem, doc.get("solver", "auto"))
    write_atomic(args.out, dumps(spline_to_dict(s)))
    cond = s.gram.condition_estimate
    print(
        f"solved N={problem.n} J={s.degree} solver={s.solver} cond={cond:.3e} "
        f"residual_max={s.residual_max:.3e}",
        file=sys.stderr if args.out is None else sys.stdout,
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.spline is None:
        raise UsageError("--spline is required for eval")
    s = spline_from_dict(_load_json(args.spline, "eval"))
    grid = {"points": []}
    if args.config is not None:
        grid = _load_json(args.config, "eval")
        _validate(grid, EVAL_SCHEMA, "eval grid")
    pts = eval_grid(s.problem.manifold, grid)
    write_atomic(args.out, eval_csv(s, pts))
    return EXIT_OK


def convergence_spec(doc: dict, seed: int) -> harness.ConvergenceSpec:
    M = _manifold(doc["manifold"])
    seed = doc.get("seed", seed)
    target = build_target(M, doc["target"], seed)
    points = build_lattice(M, doc["points"], seed) if "points" in doc else None
    return harness.ConvergenceSpec(
        manifold=M,
        family=doc["family"],
        target=target,
        t_base=doc["t_base"],
        mode=doc["mode"],
        sizes=tuple(doc.get("sizes", ())),
        orders=tuple(doc.get("orders", ())),
        points=points,
        schedule_m=doc.get("schedule_m", 0),
        lattice=doc.get("lattice", "uniform" if M.is_circle else "fps"),
        error_norms=tuple(doc.get("error_norms", ("L2", "Linf"))),
        degree=doc.get("degree"),
        tail_tol=doc.get("tail_tol"),
        eval_resolution=doc.get("eval_resolution"),
        seed=seed,
    )


def cmd_convergence(args) -> int:
    doc = _load_json(args.config, "convergence")
    _validate(doc, CONVERGENCE_SCHEMA, "convergence config")
    spec = convergence_spec(doc, args.seed)
    threads = resolve_threads(args.threads)
    run = harness.run_convergence_rho if spec.mode == "refine_density" else harness.run_convergence_order
    table = run(spec, threads=threads)
    write_atomic(args.out, table.to_csv())
    return EXIT_OK


def run_audit(kind: str, doc: dict, seed: int) -> harness.AuditReport:
    _validate(doc, AUDIT_SCHEMAS[kind], f"{kind} audit config")
    if kind == "multiplier":
        return harness.multiplier_audit(doc.get("max_degree", 12), doc.get("d", 2), doc.get("quad_degree"))
    if kind == "optimality":
        problem = build_problem({k: v for k, v in doc.items() if k not in ("trials", "band", "scale")}, seed)
        return harness.optimality_audit(
            problem, doc.get("trials", 32), doc.get("seed", seed), doc.get("band"), doc.get("scale", 1.0)
        )
    seed = doc.get("seed", seed)
    target = build_target(SPHERE2, doc["target"], seed)
    if target.coeffs is None:
        raise UsageError("transform audit needs a band-limited target")
    ps = build_lattice(SPHERE2, doc["lattice"], seed)
    return harness.transform_consistency(
        target.coeffs, ps.points, doc["smoothness"], doc["degree"], doc.get("grid_resolution", 48)
    )


def cmd_audit(args) -> int:
    doc = {} if args.config is None and args.kind == "multiplier" else _load_json(args.config, "audit")
    report = run_audit(args.kind, doc, args.seed)
    out = {"format": "manispline-audit", "version": FORMAT_VERSION, **report.to_dict()}
    write_atomic(args.out, dumps(out))
    return EXIT_OK if report.all_passed else EXIT_AUDIT


def cmd_lattice(args) -> int:
    doc = _load_json(args.config, "lattice")
    _validate(doc, LATTICE_SCHEMA, "lattice config")
    M = _manifold(doc["manifold"])
    lat = {k: doc[k] for k in ("kind", "n", "points", "symmetrize") if k in doc}
    ps = build_lattice(M, lat, doc.get("seed", args.seed))
    out = {"format": "manispline-pointset", "version": FORMAT_VERSION, **ps.to_dict()}
    if "rho" in doc:
        rep = validate_rho_lattice(ps, doc["rho"])
        out["validation"] = {"rho": rep.rho, "valid": rep.valid, "disjoint": rep.disjoint, "covers": rep.covers}
    write_atomic(args.out, dumps(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads, 0 = all cores")

    parser = argparse.ArgumentParser(prog="manispline", description="Variational splines on S^1 and S^2.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve a spline problem").set_defaults(fn=cmd_solve)
    ev = sub.add_parser("eval", parents=[common], help="evaluate a saved spline on a grid")
    ev.add_argument("--spline", help="spline JSON written by solve")
    ev.set_defaults(fn=cmd_eval)
    sub.add_parser("convergence", parents=[common], help="convergence table").set_defaults(fn=cmd_convergence)
    au = sub.add_parser("audit", parents=[common], help="optimality, multiplier or transform audit")
    au.add_argument("kind", choices=sorted(AUDIT_SCHEMAS))
    au.set_defaults(fn=cmd_audit)
    sub.add_parser("lattice", parents=[common], help="point set with statistics").set_defaults(fn=cmd_lattice)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USER if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (SingularGramError, SplineError) as exc:
        print(f"manispline: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (UsageError, ValueError) as exc:
        print(f"manispline: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
