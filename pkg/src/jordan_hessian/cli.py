"""Command-line front end.

    jordan-hessian algebra-check SPEC
    jordan-hessian verify POTENTIAL [--points P | --anchor X] [--samples N]
    jordan-hessian eval POTENTIAL --point X
    jordan-hessian reconstruct POTENTIAL --point X [--out ALGEBRA.json]
    jordan-hessian transport POTENTIAL --path [[...], [...], ...]

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 bad input.
Reports are JSON with sorted keys, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import algebra as alg
from . import geometry as geo
from . import io
from . import potential as pot
from .config import StencilConfig, VerificationConfig
from .errors import DegenerateFormError, DomainError, JordanHessianError, ReconstructionError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _cfg(args) -> VerificationConfig:
    cfg = VerificationConfig(seed=args.seed)
    if args.samples is not None:
        cfg = replace(cfg, samples=args.samples)
    if args.tol_third is not None:
        cfg = replace(cfg, tol_third=args.tol_third)
    if args.tol_first is not None:
        cfg = replace(cfg, tol_first=args.tol_first)
    return cfg


def _manifest(args, cfg, **inputs) -> dict:
    return {
        "command": args.command,
        "inputs": inputs,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tolerances": {"third": cfg.tol_third, "first": cfg.tol_first},
        "fd_step": args.fd_step,
    }


def _load_potential(args) -> pot.PotentialField:
    P = io.potential_from_doc(args.potential)
    if args.fd_step is not None:
        P = replace(P, stencil=StencilConfig(base_step=args.fd_step))
    return P


def _vector(src, dim, name) -> np.ndarray:
    x = np.asarray(io.load_json(src), dtype=float).ravel()
    if x.size != dim:
        raise InputError(f"{name} must have {dim} entries")
    return x


def _emit(report, out) -> None:
    text = io.dumps(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------


def cmd_algebra_check(args) -> int:
    cfg = _cfg(args)
    doc = io.load_json(args.spec)
    A, form = io.algebra_from_doc(doc)
    form_source = "given"
    if form is None:
        tau = alg.trace_form(A)
        form, form_source = (None, "none") if tau.is_degenerate() else (tau.matrix, "trace")
    elif alg.BilinearForm(form).is_degenerate():
        raise DegenerateFormError("degenerate form")

    scale = max(1.0, float(np.max(np.abs(A.structure))))
    jtol = cfg.jordan_tol * scale**3
    jr = alg.jordan_residual(A, cfg.samples, cfg.seed)
    ir = alg.integrability_residual(A, cfg.samples, cfg.seed)
    report = {
        "dim": A.dim,
        "family": None if A.family is None else " + ".join(map(str, A.blocks)),
        "commutativity_residual": 0.0,
        "jordan_residual": jr,
        "integrability_residual": ir,
        "form_source": form_source,
    }
    checks = {"jordan": jr <= jtol, "integrability": ir <= jtol}
    if A.dim <= 8:
        report["jordan_residual_basis"] = alg.jordan_residual(A, method="basis")
        report["integrability_residual_basis"] = alg.integrability_residual(A, method="basis")
        checks["jordan"] &= report["jordan_residual_basis"] <= jtol
        checks["integrability"] &= report["integrability_residual_basis"] <= jtol
    if form is not None:
        inv = alg.invariance_residual(A, form, cfg.samples, cfg.seed)
        report["invariance_residual"] = inv
        report["form_positive_definite"] = alg.BilinearForm(form).is_positive_definite()
        checks["invariance"] = inv <= cfg.invariance_tol * scale * max(1.0, float(np.max(np.abs(form))))
    else:
        report["invariance_residual"] = None
        report["form_positive_definite"] = None
    e = alg.find_unit(A)
    report["unit"] = None if e is None else e.tolist()
    report["checks"] = checks
    report["pass"] = all(checks.values())
    report["manifest"] = _manifest(args, cfg, spec=args.spec)
    _emit(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _boundary_distance(P: pot.PotentialField, anchor) -> float:
    """Rough distance from anchor to the edge of the domain."""
    if P.provenance == "canonical_barrier":
        spec = P.source
        delta = anchor - spec.center
        lam = min(alg.spectral(m.algebra, delta[s]).eigenvalues.min() for m, _, s in spec.slices())
        return max(float(lam), 0.0) / np.sqrt(2.0)
    if P.provenance == "series":
        A = P.source.algebra
        rho = alg.spectral_radius(A, anchor)
        return max(1.0 - rho, 0.0) / float(np.linalg.norm(A.structure))
    return 1.0


def _default_anchor(P: pot.PotentialField) -> np.ndarray:
    if P.provenance == "canonical_barrier":
        spec = P.source
        return spec.center + alg.unit(spec.algebra().algebra)
    return np.zeros(P.dim)


def sample_points(P, anchor, count, radius, seed) -> list:
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        d = rng.standard_normal(P.dim)
        d /= np.linalg.norm(d)
        r = radius * rng.uniform() ** (1.0 / P.dim)
        pts.append(anchor + r * d)
    return pts


def cmd_verify(args) -> int:
    cfg = _cfg(args)
    P = _load_potential(args)
    if args.points:
        pts = [np.asarray(p, dtype=float) for p in io.load_json(args.points)]
        if any(p.shape != (P.dim,) for p in pts):
            raise InputError("points have the wrong dimension")
        anchor, radius = None, None
    else:
        anchor = _default_anchor(P) if args.anchor is None else _vector(args.anchor, P.dim, "anchor")
        radius = args.radius if args.radius is not None else 0.3 * _boundary_distance(P, anchor)
        count = args.samples if args.samples is not None else 20
        pts = sample_points(P, anchor, count, radius, cfg.seed)
    records, skipped = [], 0
    for i, x in enumerate(pts):
        if not P.in_domain(x):
            skipped += 1
            continue
        try:
            rec = geo.verify_point(P, x, cfg)
        except (DomainError, JordanHessianError):
            skipped += 1
            continue
        rec["index"] = i
        records.append(rec)
    third = [r["residual_third"] for r in records]
    first = [r["residual_first"] for r in records]
    pass_third = bool(records) and max(third) <= cfg.tol_third
    pass_first = bool(records) and max(first) <= cfg.tol_first
    wanted = {"third": pass_third, "first": pass_first, "both": pass_third and pass_first}[args.check]
    report = {
        "pass": wanted,
        "points": records,
        "summary": {
            "evaluated": len(records),
            "skipped": skipped,
            "max_third": max(third) if third else None,
            "mean_third": float(np.mean(third)) if third else None,
            "max_first": max(first) if first else None,
            "mean_first": float(np.mean(first)) if first else None,
            "tolerance": {"third": cfg.tol_third, "first": cfg.tol_first},
            "pass_third": pass_third,
            "pass_first": pass_first,
            "check": args.check,
            "pass": wanted,
        },
        "manifest": _manifest(
            args, cfg, potential=args.potential, points=args.points,
            anchor=None if anchor is None else anchor.tolist(), radius=radius,
        ),
    }
    _emit(report, args.out)
    return EXIT_OK if wanted else EXIT_FAIL


def cmd_eval(args) -> int:
    cfg = _cfg(args)
    P = _load_potential(args)
    x = _vector(args.point, P.dim, "point")
    if not P.in_domain(x):
        raise InputError("point outside the domain of the potential")
    report = {
        "point": x.tolist(),
        "value": P.value(x),
        "gradient": P.gradient(x).tolist(),
        "hessian": P.hessian(x).tolist(),
        "source_tags": {"1": P.source_tag(1), "2": P.source_tag(2)},
        "manifest": _manifest(args, cfg, potential=args.potential, point=x.tolist()),
    }
    _emit(report, None)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = _cfg(args)
    P = _load_potential(args)
    x = _vector(args.point, P.dim, "point")
    if not P.in_domain(x):
        raise InputError("point outside the domain of the potential")
    s = geo.sample_tensors(P, x, cfg)
    third = geo.third_parallel_report(s)
    report = {"point": x.tolist(), "residual_third": third["normalized"], "residual_third_raw": third["raw"]}
    if third["normalized"] > cfg.reconstruct_gate:
        report["error"] = f"residual exceeds gate {cfg.reconstruct_gate}"
        report["pass"] = False
        report["manifest"] = _manifest(args, cfg, potential=args.potential, point=x.tolist())
        _emit(report, None)
        return EXIT_FAIL
    M = geo.algebra_from_sample(s)
    e = alg.find_unit(M.algebra)
    doc = io.algebra_to_doc(M)
    report.update(
        algebra=doc,
        unit=None if e is None else e.tolist(),
        unital=e is not None,
        jordan_residual=alg.jordan_residual(M.algebra, cfg.samples, cfg.seed),
        invariance_residual=alg.invariance_residual(M.algebra, M.form, cfg.samples, cfg.seed),
    )
    report["pass"] = True
    report["manifest"] = _manifest(args, cfg, potential=args.potential, point=x.tolist())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(io.dumps(doc))
    _emit(report, None)
    return EXIT_OK


def cmd_transport(args) -> int:
    cfg = _cfg(args)
    P = _load_potential(args)
    path = [np.asarray(p, dtype=float).ravel() for p in io.load_json(args.path)]
    if len(path) < 1 or any(p.size != P.dim for p in path):
        raise InputError("path must be a list of points of the field's dimension")
    for p in path:
        if not P.in_domain(p):
            raise InputError(f"path vertex {p.tolist()} outside the domain")
    J = geo.parallel_transport(P, path, args.steps)
    start, end = path[0], path[-1]
    M1 = geo.reconstruct_algebra(P, start, cfg)
    M2 = geo.reconstruct_algebra(P, end, cfg)
    iso = geo.isomorphism_residual(J, M1, M2, cfg.samples, cfg.seed)
    metric = geo.metric_preservation(P, J, start, end)
    ok = iso <= args.tol_iso and metric <= args.tol_metric
    report = {
        "J": J.tolist(),
        "isomorphism_residual": iso,
        "metric_residual": metric,
        "tolerance": {"isomorphism": args.tol_iso, "metric": args.tol_metric},
        "pass": ok,
        "manifest": _manifest(args, cfg, potential=args.potential,
                              path=[p.tolist() for p in path], steps=args.steps),
    }
    _emit(report, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol-third", type=float, default=None)
    common.add_argument("--tol-first", type=float, default=None)
    common.add_argument("--fd-step", type=float, default=None, help="base finite-difference step")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="jordan-hessian", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra-check", parents=[common], help="check Jordan/metrised properties")
    p.add_argument("spec")
    p.set_defaults(func=cmd_algebra_check)

    p = sub.add_parser("verify", parents=[common], help="PDE residuals over sample points")
    p.add_argument("potential")
    p.add_argument("--points", default=None, help="JSON list of points (literal or file)")
    p.add_argument("--anchor", default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--check", choices=("third", "first", "both"), default="both")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", parents=[common], help="value, gradient and Hessian at a point")
    p.add_argument("potential")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reconstruct", parents=[common], help="metrised algebra at a point")
    p.add_argument("potential")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("transport", parents=[common], help="parallel transport along a polyline")
    p.add_argument("potential")
    p.add_argument("--path", required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--tol-iso", type=float, default=1e-5)
    p.add_argument("--tol-metric", type=float, default=1e-6)
    p.set_defaults(func=cmd_transport)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateFormError as exc:
        print(f"error: degenerate form: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, io.SpecError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ReconstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except JordanHessianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
