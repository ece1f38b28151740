"""Command-line interface.

Every command prints (or writes to ``--out``) a JSON document carrying
``version`` and ``schema_version``; profile-like outputs can also be CSV.
Exit codes: 0 success or clean geometric stop, 1 verification failure,
2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import NewtonDivergenceError, SLCurvError

SCHEMA_VERSION = "1.0"

_PI_RE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """``"1.2"``, ``"pi"``, ``"3pi/4"``, ``"0.5*pi"`` -> radians."""
    m = _PI_RE.match(text.lower())
    if m:
        coef = m.group(1)
        if coef in ("", "+"):
            num = 1.0
        elif coef == "-":
            num = -1.0
        else:
            num = float(coef)
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def parse_floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class UsageError(Exception):
    pass


def load_schema() -> dict:
    """The JSON schema every command output validates against."""
    from importlib.resources import files

    return json.loads(files("slcurv").joinpath("schema/report.schema.json").read_text())


# ------------------------------------------------------------------ output
def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".slcurv-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, payload: dict, table: tuple | None = None) -> None:
    """Emit ``payload`` as JSON, or ``table = (columns, rows)`` as CSV when requested."""
    if args.format == "csv":
        if table is None:
            raise UsageError(f"command {args.command!r} has no CSV form")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols, rows = table
        w.writerow(cols)
        for row in rows:
            w.writerow(["" if (isinstance(v, float) and not math.isfinite(v)) else repr(float(v)) for v in row])
        text = buf.getvalue()
    else:
        doc = {"version": __version__, "schema_version": SCHEMA_VERSION, "command": args.command}
        doc.update(payload)
        text = json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- helpers
def _model(args, n: int):
    from .ambient import model_from_descriptor

    spec = args.model
    if spec.strip().startswith("{"):
        try:
            desc = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--model is not valid JSON: {exc}") from None
        desc.setdefault("dim", n + 1)
        return model_from_descriptor(desc)
    if spec not in ("euclidean", "hyperbolic"):
        raise UsageError("--model must be 'euclidean', 'hyperbolic' or a JSON descriptor")
    desc = {"type": spec, "dim": n + 1}
    if spec == "hyperbolic":
        desc["curvature"] = args.c if args.c is not None else -1.0
    return model_from_descriptor(desc)


def _kind(args, model) -> str:
    """Family kind with aliases resolved; ``sphere`` in a hyperbolic model is a geodesic sphere."""
    from .ambient import SpaceForm

    if args.family is None:
        raise UsageError("--family is required")
    kind = {"tube": "tube-around-geodesic", "sphere": "euclidean-sphere"}.get(args.family, args.family)
    base = getattr(model, "base", model)
    if kind == "euclidean-sphere" and isinstance(base, SpaceForm) and base.is_hyperbolic:
        kind = "geodesic-sphere"
    return kind


def _patch(args):
    """``(patch, kind, base curvature)`` from the geometry flags."""
    from .hypersurface import FamilySpec, make_family

    model = _model(args, args.n)
    kind = _kind(args, model)
    patch = make_family(FamilySpec(kind, args.R), model)
    c = getattr(model, "base", model).curvature
    return (patch.flipped() if args.flip else patch), kind, c


def _sample_points(patch, count: int, seed: int):
    rng = np.random.default_rng(seed)
    pts = [patch.center]
    if count > 1:
        pts += list(patch.sample(rng, count - 1, margin=0.2))
    return pts


# ---------------------------------------------------------------- commands
def cmd_invert(args):
    from .curvature import r_theta

    a = np.diag(args.eigs) if args.matrix is None else np.array(json.loads(args.matrix), dtype=float)
    _emit(args, {"r": r_theta(a, args.theta), "theta": args.theta})
    return 0


def cmd_eval(args):
    from .curvature import sl_value
    from .hypersurface import fundamental_forms

    if args.eigs is not None:
        a = np.diag(args.eigs)
        _emit(args, {"sl": sl_value(a, args.rho), "rho": args.rho})
        return 0
    patch, _, _ = _patch(args)
    u = np.asarray(args.at, dtype=float) if args.at is not None else patch.center
    fd = fundamental_forms(patch, u)
    _emit(args, {
        "sl": sl_value(fd.shape, args.rho),
        "rho": args.rho,
        "principal_curvatures": np.linalg.eigvalsh(fd.shape.entries),
        "point": fd.point,
    })
    return 0


def cmd_revolve(args):
    from .revolution import (
        PROFILE_CSV_COLUMNS,
        OdeParams,
        closed_form_initial,
        closed_form_sl,
        integrate_profile,
        profile_residuals,
        radius_for_theta,
    )

    n, rho = args.n, args.rho
    c = args.c if args.c is not None else (0.0 if args.family == "sphere-init" else -1.0)
    kinds = {
        "sphere-init": ("sphere", "euclidean"),
        "geodesic-sphere-init": ("geodesic-sphere", "axis"),
        "tube-init": ("tube", "axis"),
        "equidistant-init": ("equidistant", "hyperplane"),
    }
    if args.family not in kinds:
        raise UsageError(f"--family must be one of {sorted(kinds)}")
    kind, system = kinds[args.family]
    if args.R is not None:
        R = args.R
        theta = closed_form_sl(kind, R, rho, n, c) if args.theta is None else args.theta
    else:
        if args.theta is None:
            raise UsageError("give --theta or --R")
        theta = args.theta
        R = radius_for_theta(kind, n, rho, theta, c)
    params = OdeParams(n, rho, theta, c, system)
    init = closed_form_initial(kind, R, params)
    if args.s_max is not None:
        s_max = args.s_max
    elif kind == "equidistant":
        s_max = 1.0
    else:
        s_max = R
    run = integrate_profile(init, params, s_max, n_samples=args.samples)
    res = profile_residuals(run, max_points=args.residual_points)
    arr = run.arrays()
    rows = list(zip(arr["s"], arr["r"], arr["z"], arr["phi"], run.kappa_mer, run.kappa_par, res))
    payload = {
        "n": n, "rho": rho, "theta": theta, "c": c, "R": R, "system": system,
        "stop_reason": run.stop_reason, "s_stop": run.s_stop,
        "max_sl_residual": float(np.nanmax(np.abs(res))) if np.any(np.isfinite(res)) else None,
        "columns": list(PROFILE_CSV_COLUMNS),
        "rows": [list(r) for r in rows],
    }
    if args.format == "csv" and run.stop_reason:
        print(f"stop_reason: {run.stop_reason} at s={run.s_stop:.6g}", file=sys.stderr)
    _emit(args, payload, (PROFILE_CSV_COLUMNS, rows))
    return 0


def cmd_lift_check(args):
    from .legendrian import gauss_lift, legendrian_report, lifted_metric_check
    from .revolution import closed_form_sl

    patch, kind, c = _patch(args)
    theta = closed_form_sl(kind, args.R, args.rho, args.n, c) if args.theta is None else args.theta
    tol = args.tol if args.tol is not None else 1e-8
    points = []
    ok = True
    for u in _sample_points(patch, args.points, args.seed):
        rep = legendrian_report(gauss_lift(patch, u, args.rho), theta, tol)
        lm = lifted_metric_check(patch, u, args.rho).residual
        entry = dict(rep.as_dict())
        entry.update({"u": u, "lifted_metric": lm})
        ok = ok and rep.ok and lm <= tol
        points.append(entry)
    _emit(args, {"theta": theta, "rho": args.rho, "tol": tol, "passed": ok, "points": points})
    return 0 if ok else 1


def cmd_linearize(args):
    from .linearization import DeformationField, fd_variation, linearized_L, low_frequency_mode
    from .revolution import closed_form_sl

    patch, kind, c = _patch(args)
    theta = closed_form_sl(kind, args.R, args.rho, args.n, c) if args.theta is None else args.theta
    fld = DeformationField(patch, lambda x: 1.0, "one") if args.field == "one" else low_frequency_mode(patch)
    u = np.asarray(args.at, dtype=float) if args.at is not None else patch.center
    lin = linearized_L(fld, u, args.rho, theta)
    fd1 = fd_variation(fld, u, args.rho, theta, args.t)
    fd2 = fd_variation(fld, u, args.rho, theta, 2 * args.t)
    e1, e2 = abs(fd1 - lin.L_value), abs(fd2 - lin.L_value)
    tol = args.tol if args.tol is not None else 1e-5
    _emit(args, {
        "theta": theta, "rho": args.rho, "t": args.t, "field": fld.name,
        "L": lin.L_value, "fd_variation": fd1, "abs_diff": e1,
        "richardson_ratio": e2 / e1 if e1 > 0 else None,
        "J": lin.J_value, "tol": tol, "passed": e1 <= tol,
    })
    return 0 if e1 <= tol else 1


def cmd_continue(args):
    from .ambient import Bump, MetricPerturbation, SpaceForm
    from .linearization import newton_continuation

    pert = MetricPerturbation(SpaceForm(args.n + 1, -1.0), 0.0, Bump("slab", (args.center,), args.width, 1))
    path = np.linspace(0.0, args.eps_max, args.steps + 1)[1:]
    try:
        res = newton_continuation(args.R, pert, path, grid_size=args.grid, rho=args.rho)
    except NewtonDivergenceError as exc:
        _emit(args, {"stop_reason": "newton-divergence", "message": str(exc),
                     "residual": exc.residual, "iterations": exc.iterations})
        return 1
    if args.format == "csv":
        cols = ["a"] + [f"f_eps{r['eps']:.6g}" for r in res.records]
        rows = list(zip(res.a, *res.profiles))
        _emit(args, {}, (cols, rows))
        return 0
    _emit(args, {"R": args.R, "rho": args.rho, "theta": res.problem.theta, "grid": args.grid,
                 "records": res.as_dicts(), "a": res.a, "profiles": res.profiles})
    return 0


def cmd_tube_family(args):
    from .revolution import degeneration_family

    radii = [2.0 ** -m for m in range(args.levels + 1)]
    fam = degeneration_family(args.n, radii)
    cols = ("R", "rho", "f_tau", "f_tau_closed", "min_horizontal_sv", "sl_residual", "verticality_order")
    rows = [[getattr(m, k) for k in cols] for m in fam]
    ft = [m.f_tau for m in fam]
    sv = [m.min_horizontal_sv for m in fam]
    payload = {k: [r[i] for r in rows] for i, k in enumerate(cols)}
    payload.update({
        "n": args.n,
        "f_tau_strictly_decreasing": all(a > b for a, b in zip(ft, ft[1:])),
        "min_sv_strictly_decreasing": all(a > b for a, b in zip(sv, sv[1:])),
    })
    _emit(args, payload, (cols, rows))
    return 0


def cmd_solve_dirichlet(args):
    from .elliptic import dirichlet_solve, preset_problem

    prob = preset_problem(args.preset, args.nodes)
    u = dirichlet_solve(prob)
    payload = {"preset": args.preset, "nodes": list(prob.nodes), "min": float(u.min()), "max": float(u.max())}
    if args.preset == "cosh1d":
        x = prob.axes[0]
        payload["max_error"] = float(np.max(np.abs(u - np.cosh(x - 0.5) / math.cosh(0.5))))
    coords = prob.coords().reshape(-1, prob.dim)
    cols = [f"x{i}" for i in range(prob.dim)] + ["u"]
    rows = [list(p) + [v] for p, v in zip(coords, u.ravel())]
    if args.format == "json" and args.full:
        payload["u"] = u
    _emit(args, payload, (cols, rows))
    return 0


def cmd_verify(args):
    from . import verify

    report = verify.run(args.suite, seed=args.seed, tol=args.tol)
    _emit(args, report)
    return 0 if report["passed"] else 1


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slcurv", description="Special Lagrangian curvature toolkit.")
    p.add_argument("--version", action="version", version=f"slcurv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output path (atomic write); stdout if omitted")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", type=float, help="tolerance override (must be > 0 except for verify)")
        sp.add_argument("--seed", type=int, default=7)

    def geometry(sp):
        sp.add_argument("--model", default="hyperbolic", help="euclidean | hyperbolic | JSON descriptor")
        sp.add_argument("--c", type=float, help="ambient curvature for --model hyperbolic")
        sp.add_argument("--family", help="equidistant | geodesic-sphere | euclidean-sphere | tube")
        sp.add_argument("--R", type=float, default=1.0)
        sp.add_argument("--n", type=int, default=3)
        sp.add_argument("--flip", action="store_true", help="reverse the orientation")

    sp = sub.add_parser("invert", help="r with SL_r(A) = theta")
    sp.add_argument("--eigs", type=parse_floats)
    sp.add_argument("--matrix", help="JSON nested list (instead of --eigs)")
    sp.add_argument("--theta", type=parse_angle, required=True)
    common(sp)
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("eval", help="SL_rho of eigenvalues or of a family patch")
    sp.add_argument("--eigs", type=parse_floats)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--at", type=parse_floats, help="chart point")
    geometry(sp)
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("revolve", help="integrate a constant-SL profile curve")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--theta", type=parse_angle)
    sp.add_argument("--family", default="sphere-init",
                    help="sphere-init | geodesic-sphere-init | tube-init | equidistant-init")
    sp.add_argument("--R", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--s-max", dest="s_max", type=float)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--residual-points", dest="residual_points", type=int, default=25)
    common(sp)
    sp.set_defaults(func=cmd_revolve)

    sp = sub.add_parser("lift-check", help="Legendrian and lifted-metric residuals of a Gauss lift")
    geometry(sp)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--theta", type=parse_angle)
    sp.add_argument("--points", type=int, default=5)
    common(sp)
    sp.set_defaults(func=cmd_lift_check)

    sp = sub.add_parser("linearize", help="linearized operator vs finite variation")
    geometry(sp)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--theta", type=parse_angle)
    sp.add_argument("--field", choices=("one", "mode"), default="one")
    sp.add_argument("--t", type=float, default=1e-3)
    sp.add_argument("--at", type=parse_floats)
    common(sp)
    sp.set_defaults(func=cmd_linearize)

    sp = sub.add_parser("continue", help="Newton continuation of an equidistant under a metric bump")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--R", type=float, default=0.5)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--eps-max", dest="eps_max", type=float, default=0.01)
    sp.add_argument("--steps", type=int, default=5)
    sp.add_argument("--grid", type=int, default=201)
    sp.add_argument("--width", type=float, default=0.7)
    sp.add_argument("--center", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=cmd_continue)

    sp = sub.add_parser("tube-family", help="degenerating constant-SL tubes R = 2^-m")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--levels", type=int, default=8)
    common(sp)
    sp.set_defaults(func=cmd_tube_family)

    sp = sub.add_parser("solve-dirichlet", help="monotone finite-difference Dirichlet solve")
    sp.add_argument("--preset", choices=("cosh1d", "aniso2d"), default="cosh1d")
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--full", action="store_true", help="include the solution array in JSON")
    common(sp)
    sp.set_defaults(func=cmd_solve_dirichlet)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", choices=("all", "curvature", "lift", "revolution", "linearize", "elliptic"),
                    default="all")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


_VALUE_FLAGS = ("--eigs", "--at", "--theta", "--c", "--center")


def _glue_negative_values(argv: list) -> list:
    """``--eigs -1,2`` -> ``--eigs=-1,2`` so argparse does not read the value as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] in ".p"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.tol is not None and (not math.isfinite(args.tol) or args.tol < 0 or
                                 (args.tol == 0 and args.command != "verify")):
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SLCurvError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
