"""Command-line front end.

Exit status: 0 when a check passes or a verdict is confirmed, 1 when it is
refuted (the witness is written to the artifact), 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import branches, constructions, inequalities, matrix_models, poly_core, spectra, universal_sets
from .errors import GardingError, NotReal, SchemaError

BUILTIN_POLYS = {
    "lightcone": (poly_core.light_cone, [1.0, 0.0, 0.0]),
    "exa3": (poly_core.example_a3, [1.0, 1.0, 1.0]),
    "product3": (lambda: poly_core.product_poly(3), [1.0, 1.0, 1.0]),
    "det2": (lambda: poly_core.det_expanded(2), list(poly_core.identity_vector(2))),
    "det3": (lambda: poly_core.det_expanded(3), list(poly_core.identity_vector(3))),
}


class InputError(Exception):
    pass


# -- serialisation ------------------------------------------------------------------

def _fmt(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _fmt(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_fmt(v, indent, level + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_fmt(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _fmt(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "to_json_dict"):
        return _fmt(obj.to_json_dict(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _fmt(obj, indent, 0) + "\n"


def emit(args, payload, csv_text=None):
    text = csv_text if (args.format == "csv" and csv_text is not None) else dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- input parsing --------------------------------------------------------------------

def parse_vec(text, name="vector"):
    if text is None:
        return None
    try:
        text = text.strip()
        if text.startswith("["):
            return np.asarray(json.loads(text), dtype=float)
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"--{name}: cannot parse {text!r} ({exc})") from None


def load_poly(ref):
    """A JSON file path or a builtin name; returns (polynomial, default direction)."""
    if ref is None:
        raise InputError("--poly is required")
    key = os.path.splitext(os.path.basename(ref))[0].lower()
    default = np.asarray(BUILTIN_POLYS[key][1]) if key in BUILTIN_POLYS else None
    if os.path.exists(ref):
        try:
            return poly_core.load(ref), default
        except json.JSONDecodeError as exc:
            raise InputError(f"{ref}: line {exc.lineno}: {exc.msg}") from None
    if key in BUILTIN_POLYS:
        make, a = BUILTIN_POLYS[key]
        return make(), np.asarray(a)
    raise InputError(f"--poly: no file or builtin named {ref!r}")


def load_model_arg(args):
    ref = args.model
    if ref is None:
        return None
    if os.path.exists(ref):
        try:
            return matrix_models.load_model(ref)
        except json.JSONDecodeError as exc:
            raise InputError(f"{ref}: line {exc.lineno}: {exc.msg}") from None
    if ref.lstrip().startswith("{"):
        return matrix_models.model_from_json_dict(json.loads(ref))
    return matrix_models.SpectralModel(ref, args.n if args.n is not None else 2, args.p)


def target(args):
    """(object, direction argument) from --poly/--a or --model."""
    model = load_model_arg(args)
    if model is not None:
        return model, None
    p, default_a = load_poly(args.poly)
    a = parse_vec(args.a, "a")
    if a is None:
        if default_a is None:
            raise InputError("--a is required for this polynomial")
        a = default_a
    if len(a) != p.dim:
        raise InputError(f"--a must have {p.dim} entries")
    return spectra.oriented(p, a), a


def point(args, obj, name="x"):
    raw = getattr(args, name)
    if raw is None:
        raise InputError(f"--{name} is required")
    v = parse_vec(raw, name)
    if isinstance(obj, spectra.SpectralPoly) and v.size == obj.N ** 2:
        return poly_core.sym_to_vector(v.reshape(obj.N, obj.N))
    if v.shape != (obj.dim,):
        raise InputError(f"--{name} must have {obj.dim} entries")
    return v


def b_list(args, obj):
    if not args.b:
        raise InputError("--b is required")
    out = []
    for raw in args.b:
        v = parse_vec(raw, "b")
        if v.shape != (obj.dim,):
            raise InputError(f"--b must have {obj.dim} entries")
        out.append(v)
    return out


def data_function(expr):
    """Numpy function of (x, y) from an expression such as 'x^2 - y^2'."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    x, y = sympy.symbols("x y")
    try:
        e = parse_expr(expr, local_dict={"x": x, "y": y},
                       transformations=standard_transformations + (convert_xor,))
    except Exception as exc:  # sympy raises many different types here
        raise InputError(f"--data: cannot parse {expr!r} ({exc})") from None
    extra = e.free_symbols - {x, y}
    if extra:
        raise InputError(f"--data: unknown symbols {sorted(map(str, extra))}")
    f = sympy.lambdify((x, y), e, "numpy")
    return lambda X, Y: np.broadcast_to(np.asarray(f(X, Y), dtype=float), np.shape(X)).copy()


# -- verbs ----------------------------------------------------------------------------

def cmd_eval(args):
    obj, _ = target(args)
    x = point(args, obj)
    return 0, {"x": x, "value": spectra.value(obj, x)}


def cmd_spectrum(args):
    obj, a = target(args)
    x = point(args, obj)
    try:
        lam = spectra.eigenvalues(obj, a, x, args.tol or spectra.DEFAULT_TOL)
    except NotReal as exc:
        return 1, {"x": x, "status": "not-real", "residue": exc.residue}
    rp = spectra.rank_profile(obj, a, x)
    out = {"x": x, "lambda": lam.values, "max_imag": lam.max_imag, "tol": lam.tol,
           "rank": {"plus": rp.plus, "minus": rp.minus, "nullity": rp.nullity},
           "trace": spectra.trace_a(obj, a, x), "sigma": spectra.sigma_values(obj, a, x)}
    return 0, out


def cmd_classify(args):
    obj, a = target(args)
    x = point(args, obj)
    report = branches.classification_report(obj, a, x, args.tol)
    if args.k is not None:
        report["k"] = args.k
        report["descartes"] = branches.branch_membership_descartes(obj, a, x, args.k)
    return 0, report


def cmd_construct(args):
    obj, a = target(args)
    kind = args.kind
    if kind == "derivative":
        d = constructions.derivative_poly(obj, b_list(args, obj)[0], a=a, rng=args.seed)
    elif kind == "sigma":
        d = constructions.sigma_poly(obj, a, args.k)
    elif kind == "kfold":
        d = constructions.kfold_sum_poly(obj, a, args.k)
    elif kind == "delta":
        d = constructions.delta_elliptic(obj, a, args.delta)
    elif kind == "perm_product":
        d = constructions.perm_product_poly(obj, a, parse_vec(args.w, "w"))
    else:
        raise InputError(f"unknown construction {kind!r}")
    verdict = spectra.is_hyperbolic(d.realized, d.a, args.samples, rng=args.seed)
    out = {"derived": d.to_json_dict(), "degree": d.degree, "hyperbolic": verdict.confirmed}
    if d.exact:
        out["polynomial"] = poly_core.to_json_dict(d.realized)
    if args.x is not None:
        out["lambda"] = d.eigenvalues(point(args, obj)).values
    return (0 if verdict.confirmed else 1), out


def _verdict_payload(v):
    return {"confirmed": v.confirmed, "sample_count": v.sample_count,
            "witness": None if v.witness is None else v.witness, "residue": v.residue}


def cmd_check(args):
    what = args.what
    if what in ("garding", "gurvits", "garding-mixed", "gurvits-capacity", "chain", "hyperbolic", "descartes"):
        obj, a = target(args)
    if what == "garding":
        r = inequalities.garding_basic(obj, a, b_list(args, obj)[0])
        return (0 if r.passed else 1), r.to_json_dict()
    if what == "gurvits":
        r = inequalities.gurvits_two_point(obj, a, b_list(args, obj)[0])
        return (0 if r.passed else 1), r.to_json_dict()
    if what == "garding-mixed":
        r = inequalities.garding_mixed(obj, b_list(args, obj), a)
        return (0 if r.passed else 1), r.to_json_dict()
    if what == "gurvits-capacity":
        cfg = inequalities.CapacityConfig(restarts=args.restarts, seed=args.seed)
        r = inequalities.gurvits_capacity(obj, b_list(args, obj), a, cfg)
        return (0 if r.passed else 1), r.to_json_dict()
    if what == "chain":
        cfg = inequalities.CapacityConfig(restarts=args.restarts, seed=args.seed)
        r = inequalities.refinement_chain(obj, b_list(args, obj), a, cfg)
        return (0 if r["holds"] else 1), r
    if what == "hyperbolic":
        v = spectra.is_hyperbolic(obj, a, args.samples, rng=args.seed)
        return (0 if v else 1), _verdict_payload(v)
    if what == "descartes":
        return _descartes_sweep(obj, a, args)
    if what == "dg-positivity":
        model = load_model_arg(args)
        if model is None:
            raise InputError("--model is required")
        v = matrix_models.dg_positivity_check(model, args.samples, rng=args.seed)
        return (0 if v else 1), _verdict_payload(v)
    if what in ("convexity", "monotonicity", "duality"):
        E = _universal_set(args)
        if what == "convexity":
            v = universal_sets.convexity_probe(E, args.samples, rng=args.seed)
        elif what == "monotonicity":
            v = universal_sets.monotonicity_check(E, args.samples, rng=args.seed)
        else:
            v = _duality_sweep(E, args)
        return (0 if v else 1), _verdict_payload(v)
    raise InputError(f"unknown check {what!r}")


def _universal_set(args):
    if args.set is None:
        raise InputError("--set is required")
    text = args.set
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return universal_sets.from_json_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"--set: line {exc.lineno}: {exc.msg}") from None


def _duality_sweep(E, args):
    rng = np.random.default_rng(args.seed)
    lam = rng.standard_normal((args.samples, E.m)) * 2
    twice = universal_sets.dual_set(universal_sets.dual_set(E))
    a, b = E.contains(lam), twice.contains(lam)
    bad = np.nonzero(a != b)[0]
    if len(bad):
        return spectra.Verdict(False, args.samples, lam[bad[0]])
    return spectra.Verdict(True, args.samples)


def _descartes_sweep(obj, a, args):
    rng = np.random.default_rng(args.seed)
    X = rng.standard_normal((args.samples, obj.dim))
    agree = excluded = 0
    m = obj.degree
    for x in X:
        sig = branches.full_sigma(obj, a, x)
        ztol = 1e-9 * np.max(np.abs(sig))
        if np.any(np.abs(sig) < 10 * ztol):
            excluded += 1
            continue
        lam = spectra.eigenvalues(obj, a, x).values
        for k in range(1, m + 1):
            by_sign = branches.sign_variation(sig, ztol) <= k - 1
            if by_sign != (lam[k - 1] >= -branches.default_tol(x)):
                return 1, {"agree": False, "witness": x, "k": k}
        agree += 1
    return 0, {"agree": True, "checked": agree, "excluded": excluded}


def cmd_capacity(args):
    obj, a = target(args)
    bs = b_list(args, obj)
    cfg = inequalities.CapacityConfig(restarts=args.restarts, seed=args.seed)
    res = inequalities.capacity(obj, bs, a, cfg)
    out = {"capacity": res.to_json_dict(), "b": bs}
    if args.grid_oracle:
        g = inequalities.capacity_grid(obj, bs)
        out["grid_oracle"] = g
        out["relative_gap"] = abs(res.value - g) / g
    return (0 if res.converged else 1), out


def cmd_solve(args):
    from . import dirichlet

    model = load_model_arg(args) or matrix_models.SpectralModel("det_real", 2)
    E = _universal_set(args) if args.set else None
    eq = dirichlet.Equation(model, k=None if E is not None else (args.branch or 1), E=E, mode=args.mode)
    bc = dirichlet.boundary_convexity_check(args.domain, model, k=eq.k, E=None if eq.k else E, radius=args.radius)
    if not bc.admitted and not args.force:
        return 1, {"boundary_convexity": bc.status, "details": bc.details}
    grid = dirichlet.Grid2D(args.grid, args.radius, args.domain)
    g = data_function(args.data)
    cfg = dirichlet.SolveConfig(method=args.method, tol=args.tol or 1e-7)
    report, u = dirichlet.solve(eq, grid, g, cfg)
    cert = dirichlet.harmonic_certificate(u, eq, grid, 1e-6)
    out = {"report": report.to_json_dict(), "certificate": cert.passed,
           "boundary_convexity": bc.status, "grid": args.grid, "h": grid.h}
    if args.exact:
        out["max_error"] = dirichlet.max_error(grid, u, data_function(args.exact))
    if args.history:
        with open(args.history, "w") as fh:
            fh.write(report.history_csv())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(grid.to_csv())
        args.out = args.report
    status = 0 if (report.converged and cert.passed) else 1
    return status, out


def cmd_curves(args):
    obj, a = target(args)
    x = point(args, obj)
    b = b_list(args, obj)[0]
    bundle = spectra.track_curves(obj, a, b, x, args.tmin, args.tmax, args.steps)
    out = {"t": bundle.t_samples, "curves": bundle.curves, "arrangement": bundle.arrangement,
           "increasing": bundle.is_strictly_increasing()}
    return (0 if out["increasing"] else 1), out, bundle.to_csv()


VERBS = {"eval": cmd_eval, "spectrum": cmd_spectrum, "classify": cmd_classify, "construct": cmd_construct,
         "check": cmd_check, "capacity": cmd_capacity, "solve": cmd_solve, "curves": cmd_curves}


def build_parser():
    parser = argparse.ArgumentParser(prog="garding", description="Hyperbolic polynomial toolkit")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--poly")
        sp.add_argument("--model")
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--a")
        sp.add_argument("--x")
        sp.add_argument("--b", action="append")
        sp.add_argument("--k", type=int)
        sp.add_argument("--delta", type=float)
        sp.add_argument("--c", type=float)
        sp.add_argument("--w")
        sp.add_argument("--set", help="universal set JSON (inline or file)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--samples", type=int, default=200)
        sp.add_argument("--restarts", type=int, default=8)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        return sp

    for verb in ("eval", "spectrum", "classify", "capacity"):
        sp = common(sub.add_parser(verb))
        if verb == "capacity":
            sp.add_argument("--grid-oracle", action="store_true")
    common(sub.add_parser("construct")).add_argument(
        "--kind", required=True, choices=("derivative", "sigma", "kfold", "delta", "perm_product"))
    common(sub.add_parser("check")).add_argument(
        "what", choices=("garding", "garding-mixed", "gurvits", "gurvits-capacity", "chain", "hyperbolic",
                         "descartes", "dg-positivity", "convexity", "monotonicity", "duality"))
    sp = common(sub.add_parser("solve"))
    sp.add_argument("--branch", type=int)
    sp.add_argument("--domain", choices=("disk", "square"), default="disk")
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--grid", type=int, default=65)
    sp.add_argument("--data", required=True)
    sp.add_argument("--exact")
    sp.add_argument("--mode", choices=("auto", "eigen", "hessian"), default="auto")
    sp.add_argument("--method", choices=("newton", "explicit"), default="newton")
    sp.add_argument("--history")
    sp.add_argument("--report", help="JSON report path when --out receives the solution CSV")
    sp.add_argument("--force", action="store_true", help="solve even if the boundary check fails")
    sp = common(sub.add_parser("curves"))
    sp.add_argument("--tmin", type=float, default=-2.0)
    sp.add_argument("--tmax", type=float, default=2.0)
    sp.add_argument("--steps", type=int, default=41)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        result = VERBS[args.verb](args)
    except (InputError, SchemaError, FileNotFoundError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except (ValueError, GardingError) as exc:
        if isinstance(exc, GardingError) and not isinstance(exc, ValueError):
            sys.stderr.write(f"error: {exc}\n")
            return 1
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    status, payload, *csv_text = result
    emit(args, payload, csv_text[0] if csv_text else None)
    return status


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
