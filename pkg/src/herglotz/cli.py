"""Batch command-line front end.

Subcommands mirror the library surface: membership and extremality reports,
convex decomposition, the two measure constructors, annulus tables, the
defect-kernel decomposition residual, and a randomized extremality sweep.
Inputs and outputs are JSON (deterministic: fixed float precision and key
order) or CSV for tabular data.

Exit codes: 0 success, 1 malformed input, 2 mathematical precondition
violated (for example a non-member measure), 3 tolerance pathology
(decomposition depth budget exhausted).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .annulus import Annulus, BoundaryPoint, INNER, OUTER
from .config import tolerance
from .errors import DepthExceededError, PreconditionError, SchemaError
from .measures import (
    build_special,
    build_spectral,
    choquet_decompose,
    is_extreme,
    validate_membership,
)
from .sampling import random_member
from .schur import cayley
from .serialize import (
    annulus_config_from_obj,
    decomposition_to_obj,
    dumps,
    function_sample_to_obj,
    loads,
    measure_from_obj,
    measure_to_obj,
)


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_complex(text: str) -> complex:
    if "," in text:
        re_part, im_part = text.split(",", 1)
        return complex(float(re_part), float(im_part))
    try:
        return complex(text)
    except ValueError as exc:
        raise SchemaError(f"cannot parse complex number {text!r}") from exc


def _annulus_from_args(args) -> Annulus:
    cfg = {}
    if args.config:
        cfg = annulus_config_from_obj(_read_json(args.config))
    q = args.q if args.q is not None else cfg.get("q", 0.5)
    if args.t0 is not None:
        t0 = _parse_complex(args.t0)
    else:
        t0 = complex(cfg.get("t0_re", np.sqrt(0.5)), cfg.get("t0_im", 0.0))
    modes = args.modes if args.modes is not None else cfg.get("M", 64)
    grid = args.grid if args.grid is not None else cfg.get("grid", 256)
    return Annulus(q, t0, modes=modes, grid=grid)


def _matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise SchemaError("matrix must be {'re': [[...]], 'im': [[...]]}")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise SchemaError("matrix parts must be rectangular and congruent")
    return re + 1j * im


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()


# -- subcommand bodies ---------------------------------------------------------

def _cmd_validate(args) -> int:
    mu = measure_from_obj(_read_json(args.input))
    report = validate_membership(mu, tolerance(args.tol))
    _write_text(args.output, dumps(report.to_obj()))
    return 0


def _cmd_extreme(args) -> int:
    mu = measure_from_obj(_read_json(args.input))
    report = validate_membership(mu, tolerance(args.tol))
    if not report.is_member:
        _write_text(args.output, dumps(report.to_obj()))
        raise PreconditionError("input measure is not a member; residual report written")
    result = is_extreme(mu, tol=args.tol)
    _write_text(args.output, dumps(result.to_obj()))
    return 0


def _cmd_decompose(args) -> int:
    mu = measure_from_obj(_read_json(args.input))
    decomposition = choquet_decompose(mu, max_depth=args.max_depth, tol=args.tol)
    _write_text(args.output, dumps(decomposition_to_obj(decomposition)))
    return 0


def _cmd_build_special(args) -> int:
    obj = _read_json(args.input)
    if not isinstance(obj, dict) or "scalars" not in obj or "weights" not in obj:
        raise SchemaError("input must contain 'scalars' and 'weights'")
    scalars = [measure_from_obj(o) for o in obj["scalars"]]
    weights = [_matrix_from_obj(o) for o in obj["weights"]]
    mu = build_special(scalars, weights, tol=args.tol)
    _write_text(args.output, dumps(measure_to_obj(mu)))
    return 0


def _cmd_build_spectral(args) -> int:
    obj = _read_json(args.input)
    if not isinstance(obj, dict) or "scalars" not in obj or "projections" not in obj:
        raise SchemaError("input must contain 'projections' and 'scalars'")
    scalars = [measure_from_obj(o) for o in obj["scalars"]]
    projections = [_matrix_from_obj(o) for o in obj["projections"]]
    mu = build_spectral(projections, scalars, tol=args.tol)
    _write_text(args.output, dumps(measure_to_obj(mu)))
    return 0


def _cmd_annulus_phi(args) -> int:
    ann = _annulus_from_args(args)
    phi = ann.phi_at_nodes()
    omega = ann.harmonic_measure_weights()
    rows = []
    for comp, name in ((OUTER, "outer"), (INNER, "inner")):
        for k, angle in enumerate(ann.node_angles):
            rows.append((name, float(angle), float(phi[comp][k]), float(omega[comp][k])))
    _write_text(args.output, _csv_text(
        ("component", "angle", "phi", "harmonic_measure_weight"), rows))
    return 0


def _cmd_annulus_extremal(args) -> int:
    ann = _annulus_from_args(args)
    x0 = BoundaryPoint(OUTER, args.x0_angle)
    x1 = BoundaryPoint(INNER, args.x1_angle)
    w0, w1 = ann.extremal_weights(x0, x1)
    f_x = ann.extremal_herglotz(x0, x1)
    points = ann.interior_grid(radii=args.sample_radii, angles=args.sample_angles).ravel()
    f_vals = f_x(points)
    s_vals = cayley(f_vals)
    payload = {
        "q": ann.q,
        "t0_re": ann.t0.real,
        "t0_im": ann.t0.imag,
        "M": ann.modes,
        "grid": ann.grid,
        "x0_angle": x0.angle,
        "x1_angle": x1.angle,
        "phi0": ann.phi(x0),
        "phi1": ann.phi(x1),
        "w0": w0,
        "w1": w1,
        "f_at_t0_re": float(np.real(f_x(ann.t0))),
        "f_at_t0_im": float(np.imag(f_x(ann.t0))),
        "herglotz_samples": function_sample_to_obj(points, f_vals),
        "schur_samples": function_sample_to_obj(points, s_vals),
    }
    _write_text(args.output, dumps(payload))
    return 0


def _agler_case(args, ann: Annulus):
    if args.case == "zero":
        return lambda z: 0.0 * np.asarray(z, dtype=complex), None
    if args.case == "extremal":
        x0 = BoundaryPoint(OUTER, args.x0_angle)
        x1 = BoundaryPoint(INNER, args.x1_angle)
        f_x = ann.extremal_herglotz(x0, x1)
        nu = [(1.0, (x0, x1))]
        return lambda z: cayley(f_x(z)), nu
    if args.case == "linear":
        coeff = args.coeff
        return lambda z: coeff * (np.asarray(z, dtype=complex) - ann.t0), None
    raise SchemaError(f"unknown case {args.case!r}")


def _cmd_agler_check(args) -> int:
    ann = _annulus_from_args(args)
    s, nu = _agler_case(args, ann)
    if nu is None:
        nu = ann.decompose_herglotz(s, max_depth=args.max_depth)
    pts = ann.interior_grid(radii=args.zw, angles=2)
    zs, ws = pts[:, 0], pts[:, 1]
    residual = ann.agler_residual(s, nu, zs, ws)
    header = ["z\\w", *[f"{w.real:.12g}{w.imag:+.12g}j" for w in ws]]
    rows = []
    for i, z in enumerate(zs):
        rows.append((f"{z.real:.12g}{z.imag:+.12g}j",
                     *[float(v) for v in residual[i]]))
    _write_text(args.output, _csv_text(header, rows))
    sys.stderr.write(f"max residual {residual.max():.3e} over "
                     f"{len(nu)} decomposition terms\n")
    return 0


def _cmd_sweep(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for index in range(args.count):
        mu = random_member(rng, args.size, args.constraints)
        report = is_extreme(mu, tol=args.tol)
        ranks = sorted(int(np.linalg.matrix_rank(a.weight, tol=1e-9)) for a in mu.atoms)
        rows.append((index, len(mu.atoms), report.support_count,
                     int(report.is_extreme), int(report.bound_ok),
                     "+".join(str(r) for r in ranks)))
    _write_text(args.output, _csv_text(
        ("index", "atoms", "support_count", "is_extreme", "bound_ok", "rank_pattern"),
        rows))
    return 0


# -- argument wiring -------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="input JSON path")
    parser.add_argument("--output", help="output path (default stdout)")
    parser.add_argument("--config", help="annulus config JSON path")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--tol", type=float, default=None,
                        help="feasibility tolerance (or HERGLOTZ_TOL)")
    parser.add_argument("--max-depth", type=int, default=None, dest="max_depth")
    parser.add_argument("--q", type=float, default=None, help="inner radius")
    parser.add_argument("--t0", default=None, help="base point, 're,im' or complex literal")
    parser.add_argument("--modes", type=int, default=None, help="Laurent truncation order")
    parser.add_argument("--grid", type=int, default=None, help="nodes per boundary circle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="herglotz",
        description="constrained matrix-measure extremality and annulus "
                    "Herglotz/Schur machinery")
    sub = parser.add_subparsers(dest="verb", required=True)

    candidates = {
        "validate": (_cmd_validate, "membership report for a measure"),
        "extreme": (_cmd_extreme, "extremality report with witness"),
        "decompose": (_cmd_decompose, "convex decomposition into extremes"),
        "build-special": (_cmd_build_special, "assemble sum mu_k L_k"),
        "build-spectral": (_cmd_build_spectral, "assemble sum mu_k P_k"),
        "annulus-phi": (_cmd_annulus_phi, "period functional and harmonic measure table"),
        "annulus-extremal": (_cmd_annulus_extremal, "two-point extremal data and samples"),
        "agler-check": (_cmd_agler_check, "defect decomposition residual matrix"),
        "sweep": (_cmd_sweep, "randomized extremality survey"),
    }
    for name, (func, help_text) in candidates.items():
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(func=func)
        if name == "annulus-extremal":
            p.add_argument("--x0-angle", type=float, default=0.0, dest="x0_angle")
            p.add_argument("--x1-angle", type=float, default=0.0, dest="x1_angle")
            p.add_argument("--sample-radii", type=int, default=8, dest="sample_radii")
            p.add_argument("--sample-angles", type=int, default=8, dest="sample_angles")
        if name == "agler-check":
            p.add_argument("--case", choices=("zero", "extremal", "linear"),
                           default="zero")
            p.add_argument("--x0-angle", type=float, default=0.0, dest="x0_angle")
            p.add_argument("--x1-angle", type=float, default=0.0, dest="x1_angle")
            p.add_argument("--coeff", type=float, default=0.2,
                           help="scale of the linear test function")
            p.add_argument("--zw", type=int, default=8, help="z/w grid side length")
        if name == "sweep":
            p.add_argument("--count", type=int, default=50)
            p.add_argument("--size", type=int, default=2, help="matrix size N")
            p.add_argument("--constraints", type=int, default=1, help="constraint count m")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    requires_input = args.verb in ("validate", "extreme", "decompose",
                                   "build-special", "build-spectral")
    try:
        if requires_input and not args.input:
            raise SchemaError(f"{args.verb} requires --input")
        return args.func(args)
    except SchemaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except PreconditionError as exc:
        sys.stderr.write(f"precondition violated: {exc}\n")
        return 2
    except DepthExceededError as exc:
        sys.stderr.write(f"tolerance pathology: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
