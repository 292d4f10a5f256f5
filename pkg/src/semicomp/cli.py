"""Command-line interface: ``semicomp <command> [options]``.

Exit codes: 0 verdict passes, 1 verdict fails (a witness is printed),
2 input or geometry error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from . import conics
from .errors import GeometryError, NumericalFailure
from .kernel.comparison import compare_sampled, triangle_compare
from .kernel.shape import radial_shape
from .spaces import Space, space_from_dict
from .triangles import realize
from .warped import FriedmannModel, RWModel, rw_bound_interval, rw_fluid, rw_table

SCHEMA = "semicomp/v1"
CHUNK = 25

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- helpers ---------------------------------------------------------------------

def _floats(text: str, count: Optional[int] = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} numbers, got {len(vals)}")
    return vals


def _clean(obj):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def emit_json(command: str, payload: dict) -> str:
    return json.dumps(_clean({"schema": SCHEMA, "command": command, **payload}),
                      sort_keys=True, indent=2)


def emit_csv(command: str, header: Sequence[str], rows, trailer: Optional[dict] = None) -> str:
    buf = io.StringIO()
    buf.write(f"# semicomp-csv v1 {command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    meta = {"schema": SCHEMA, "command": command, **(trailer or {})}
    buf.write("# " + json.dumps(_clean(meta), sort_keys=True) + "\n")
    return buf.getvalue()


def _space_doc(args) -> dict:
    if args.metric:
        try:
            with open(args.metric) as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read metric document: {exc}") from None
    return {"family": "builtin", "name": args.space, "params": json.loads(args.params or "{}")}


def _workers() -> int:
    try:
        n = int(os.environ.get("SEMICOMP_THREADS", "1"))
    except ValueError:
        raise UsageError("SEMICOMP_THREADS must be an integer") from None
    return max(1, min(n, os.cpu_count() or 1))


# --- realize ----------------------------------------------------------------------

def cmd_realize(args) -> tuple[int, str]:
    tri = realize(_floats(args.triple, 3), args.K, args.prefer)
    return EXIT_PASS, emit_json("realize", {"triangle": tri.as_dict()})


# --- compare -----------------------------------------------------------------------

def _compare_chunk(doc: dict, K: float, sense: str, count: int, seed: int, index: int,
                   size: float, tol: float) -> dict:
    """One deterministic chunk; the seed is split per chunk index so results do not depend on workers."""
    space = space_from_dict(doc)
    res = compare_sampled(space.metric, K, sense, count, [seed, index], size, chunk=count,
                          stop_on_violation=True, tol=tol)
    out = res.as_dict()
    out["margins"] = [r.min_margin for r in res.reports]
    return out


def cmd_compare(args) -> tuple[int, str]:
    doc = _space_doc(args)
    space = space_from_dict(doc)
    K = args.K if args.K is not None else space.curvature
    if K is None:
        raise UsageError("--K is required for spaces without a known constant curvature")
    size = args.size if args.size is not None else space.triangle_size
    if args.vertices:
        pts = [_floats(s, space.metric.dim) for s in args.vertices.split(";")]
        if len(pts) != 3:
            raise UsageError("--vertices needs three points separated by ';'")
        rep = triangle_compare(space.metric, *pts, K, sense=args.sense, tol=args.tol,
                               degenerate_preference=args.prefer)
        payload = {"space": space.name, "K": K, "sense": args.sense, "report": rep.as_dict()}
        return (EXIT_PASS if rep.holds else EXIT_FAIL), _render_compare(args, payload, [rep.as_dict()])

    counts = [CHUNK] * (args.samples // CHUNK) + ([args.samples % CHUNK] if args.samples % CHUNK else [])
    jobs = [(doc, K, args.sense, c, args.seed, i, size, args.tol) for i, c in enumerate(counts)]
    results: list[dict] = []
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_compare_chunk, *job) for job in jobs]
            for f in futures:
                results.append(f.result())
                if results[-1]["found"]:
                    for rest in futures:
                        rest.cancel()
                    break
    else:
        for job in jobs:
            results.append(_compare_chunk(*job))
            if results[-1]["found"]:
                break
    checked = sum(r["checked"] for r in results)
    skipped = sum(r["skipped"] for r in results)
    margins = [m for r in results for m in r["margins"]]
    witness = next((r["witness"] for r in results if r["found"]), None)
    payload = {"space": space.name, "K": K, "sense": args.sense, "seed": args.seed,
               "samples": args.samples, "checked": checked, "skipped": skipped,
               "worst_margin": min(margins) if margins else float("nan"),
               "violation": witness is not None, "witness": witness, "margins": margins}
    if checked == 0:
        return EXIT_NUMERICAL, _render_compare(args, payload, [])
    return (EXIT_FAIL if witness else EXIT_PASS), _render_compare(args, payload, [])


def _render_compare(args, payload: dict, reports: list) -> str:
    if args.out == "csv":
        if reports:
            rows = [(i, r["min_margin"], r["holds"]) for i, r in enumerate(reports)]
        else:
            rows = [(i, m, m >= -args.tol) for i, m in enumerate(payload["margins"])]
        trailer = {k: v for k, v in payload.items() if k != "margins"}
        return emit_csv("compare", ["index", "min_margin", "holds"], rows, trailer)
    return emit_json("compare", payload)


# --- rw -------------------------------------------------------------------------------

def _rw_model(args):
    if args.model == "friedmann":
        return FriedmannModel(int(args.C), float(args.E))
    doc = _space_doc(args)
    space: Space = space_from_dict(doc)
    if space.warp is None:
        raise UsageError(f"space {space.name!r} is not a warped product")
    spec = space.warp
    if not spec.interval:
        raise UsageError(f"space {space.name!r} has a non-interval base")
    return RWModel(tuple(spec.base), spec.warp, spec.fiber_C, spec.fiber_dim, args.lam, space.name)


def cmd_rw(args) -> tuple[int, str]:
    model = _rw_model(args)
    rng = tuple(_floats(args.t_range, 2)) if args.t_range else None
    if isinstance(model, FriedmannModel):
        iv = rw_bound_interval(model, rng, lam=args.lam)
        lo, hi = rng if rng else ((0.05, 2 * math.pi - 0.05) if model.C == 1 else (0.1, 20.0))
        tau = np.linspace(lo, hi, args.points)
        t = model.t_f(tau)[0]
        km, kp = model.curvatures(tau)
        shift = args.lam / 3.0
        rho, p = rw_fluid((km + shift, kp + shift), lam=args.lam)
        table = np.column_stack([t, km + shift, kp + shift, rho, p])
        extra = {"model": "friedmann", "C": model.C, "E": model.E, "parameter": "tau",
                 "range": [lo, hi] if rng is None else list(rng)}
    else:
        iv = rw_bound_interval(model, rng, lam=args.lam)
        lo, hi = rng if rng else model.interval
        table = rw_table(model, np.linspace(lo, hi, args.points))
        extra = {"model": model.name, "C": model.C, "parameter": "t", "range": [lo, hi]}
    payload = {"interval": iv.as_dict(), **extra}
    code = EXIT_FAIL if iv.empty else EXIT_PASS
    if args.out == "csv":
        return code, emit_csv("rw", ["t", "K_minus", "K_plus", "rho", "p"], table, payload)
    payload["table"] = {"columns": ["t", "K_minus", "K_plus", "rho", "p"], "rows": table}
    return code, emit_json("rw", payload)


# --- conics -----------------------------------------------------------------------------

def cmd_conics(args) -> tuple[int, str]:
    q = conics.CurvatureQuadric.from_upper(_floats(args.entries, 6), not args.anti)
    rep = conics.classify(q)
    payload = {"Q1": q.Q1, "lorentz": q.lorentz, "report": rep.as_dict(),
               "null_sign": conics.null_sign(q).as_dict()}
    if rep.case == 3:
        try:
            payload["gap"] = conics.bound_gap(q).as_dict()
        except GeometryError as exc:
            payload["gap"] = {"error": str(exc)}
    code = EXIT_FAIL if rep.case == 2 else EXIT_PASS
    if args.out == "csv":
        b = rep.bound_interval
        row = [rep.case, rep.I_sp.lo, rep.I_sp.hi, rep.I_ti.lo, rep.I_ti.hi,
               b.lo if b else float("nan"), b.hi if b else float("nan")]
        return code, emit_csv("conics", ["case", "sp_lo", "sp_hi", "ti_lo", "ti_hi",
                                         "bound_lo", "bound_hi"], [row])
    return code, emit_json("conics", payload)


# --- riccati -------------------------------------------------------------------------------

def cmd_riccati(args) -> tuple[int, str]:
    space = space_from_dict(_space_doc(args))
    m = space.metric
    q = np.array(_floats(args.point, m.dim)) if args.point else 0.5 * (m.lower + m.upper)
    if args.direction:
        u = np.array(_floats(args.direction, m.dim))
    else:
        rng = np.random.default_rng(args.seed)
        u = rng.standard_normal(m.dim)
        u *= 0.3 / np.linalg.norm(u)
    K = args.K if args.K is not None else (space.curvature or 0.0)
    t_end = args.t_end
    rs = radial_shape(m, q, u, K, t_end=t_end + 0.01)
    ts = np.linspace(0.0, t_end, args.samples)
    rows = []
    for t in ts:
        op = rs.at(t)
        rows.append((float(t), rs.residual(t), op.shape_bound_margin(), op.self_adjoint_defect()))
    res = max(r[1] for r in rows)
    margin = min(r[2] for r in rows)
    payload = {"space": space.name, "K": K, "point": q, "direction": u, "energy": rs.energy,
               "max_residual": res, "min_shape_bound_margin": margin}
    code = EXIT_PASS if margin >= -args.tol else EXIT_FAIL
    header = ["t", "residual", "shape_bound_margin", "self_adjoint_defect"]
    if args.out == "csv":
        return code, emit_csv("riccati", header, rows, payload)
    payload["table"] = {"columns": header, "rows": rows}
    return code, emit_json("riccati", payload)


# --- parser ---------------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, space: bool = True):
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, default=1e-6)
    if space:
        p.add_argument("--space", default="de_sitter", help="built-in space name")
        p.add_argument("--params", default=None, help="JSON parameters for the built-in space")
        p.add_argument("--metric", default=None, help="metric JSON document (overrides --space)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semicomp", description="Curvature comparison toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="realize a side triple in a model space")
    p.add_argument("--triple", required=True, help="three signed lengths a,b,c")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--prefer", choices=("definite", "lorentz"), default="definite")
    _add_common(p, space=False)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("compare", help="triangle comparison on a chart")
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--sense", choices=("ge", "le"), default="ge")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--size", type=float, default=None)
    p.add_argument("--vertices", default=None, help="p;q;r with comma-separated coordinates")
    p.add_argument("--prefer", choices=("definite", "lorentz"), default="definite")
    _add_common(p)
    p.set_defaults(func=cmd_compare, tol=1e-8)

    p = sub.add_parser("rw", help="curvature bounds of a Robertson-Walker space")
    p.add_argument("--model", choices=("friedmann", "space"), default="friedmann")
    p.add_argument("--C", type=int, default=1)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--t-range", dest="t_range", default=None,
                   help="lo,hi in tau for Friedmann models, in t otherwise")
    p.add_argument("--points", type=int, default=41)
    _add_common(p)
    p.set_defaults(func=cmd_rw)

    p = sub.add_parser("conics", help="classify curvature ranges on a 3-plane")
    p.add_argument("entries", help="q11,q12,q13,q22,q23,q33")
    p.add_argument("--anti", action="store_true", help="anti-Lorentz 3-plane")
    _add_common(p, space=False)
    p.set_defaults(func=cmd_conics)

    p = sub.add_parser("riccati", help="shape-operator diagnostics along a radial geodesic")
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--point", default=None)
    p.add_argument("--direction", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=11)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_riccati)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str]:
    """Parse and execute; returns ``(exit_code, text)`` without printing."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_PASS), ""
    try:
        return args.func(args)
    except (UsageError, GeometryError, ValueError, KeyError, TypeError) as exc:
        return EXIT_USAGE, emit_json(args.command, {"error": type(exc).__name__,
                                                    "message": str(exc)})
    except NumericalFailure as exc:
        return EXIT_NUMERICAL, emit_json(args.command, {"error": type(exc).__name__,
                                                        "message": str(exc)})


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    if text:
        stream = sys.stdout if code in (EXIT_PASS, EXIT_FAIL) else sys.stderr
        stream.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
