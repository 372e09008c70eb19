"""Command-line surface: classify, derive, solve, verify, cone, smoothness,
report.

Outputs are deterministic: fixed float formatting, sorted JSON keys, and all
tolerance defaults embedded in every report.  Exit status 0 on success, 1
when a verification check misses its bar, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .closed_form import compare, profile
from .flow import derive_flow, kaehler_search
from .homogeneous import ModelError, get_model
from .integrate import (
    ORBIT_COLLAPSING,
    IntegrationError,
    IntegratorConfig,
    OrbitSpec,
    Trajectory,
    solve_orbit,
)
from .structures import build_invariant_structure
from .verify import (
    DEFAULT_BARS,
    VerifyError,
    check_closure_samples,
    cone_fit,
    run_report,
    smoothness_report,
    su4_family_check,
)


class InputError(ValueError):
    pass


def _model_from_args(args):
    kind = args.model.upper()
    if kind == "Q":
        indices = (
            args.k if args.k is not None else 1,
            args.l if args.l is not None else 1,
            args.m if args.m is not None else 1,
        )
    elif kind == "M":
        indices = (
            args.k if args.k is not None else 1,
            args.l if args.l is not None else 1,
        )
    else:
        raise InputError(f"unknown model {args.model!r}")
    return get_model(kind, indices)


def _orbit_spec(args, kind: str) -> OrbitSpec:
    collapsing = ORBIT_COLLAPSING[kind].get(args.orbit)
    if collapsing is None:
        raise InputError(f"unknown orbit {args.orbit!r} for model {kind}")
    state = ("a", "b", "c", "f") if kind == "Q" else ("a", "b", "c")
    values = {}
    for name in state:
        raw = getattr(args, f"{name}0", None)
        if raw is None:
            continue
        values[name] = Fraction(raw)
    try:
        return OrbitSpec(kind, args.orbit, values, negative_branch=args.negative_branch)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _config(args) -> IntegratorConfig:
    return IntegratorConfig(
        rtol=args.rtol,
        atol=args.atol,
        t_end=args.t_end,
        initial_step=args.initial_step,
        eps=args.eps,
    )


def _emit(doc: dict, path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _add_model_flags(p, with_indices=True):
    p.add_argument("--model", required=True, choices=["q", "m", "Q", "M"])
    if with_indices:
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--l", type=int, default=None)
        p.add_argument("--m", type=int, default=None)


def _add_solve_flags(p):
    p.add_argument("--orbit", required=True)
    for name in ("a0", "b0", "c0", "f0"):
        p.add_argument(f"--{name}", default=None, help="exact initial value (fraction ok)")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--t-end", dest="t_end", type=float, default=1e4)
    p.add_argument("--eps", type=float, default=None, help="series-start offset")
    p.add_argument("--initial-step", dest="initial_step", type=float, default=0.0)
    p.add_argument("--negative-branch", action="store_true")


def _add_bar_flags(p):
    p.add_argument("--cone-bar", type=float, default=DEFAULT_BARS["cone"])
    p.add_argument("--closure-bar", type=float, default=None)
    p.add_argument("--closed-form-bar", type=float, default=DEFAULT_BARS["closed_form"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="holoflow",
        description="Derive, integrate and verify the invariant holonomy flows",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="admissibility of the embedding indices")
    _add_model_flags(p)

    p = sub.add_parser("derive", help="derive the holonomy ODE system")
    _add_model_flags(p, with_indices=False)
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")

    p = sub.add_parser("solve", help="integrate from a singular orbit, write CSV")
    _add_model_flags(p, with_indices=False)
    _add_solve_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="verify a stored trajectory CSV")
    _add_model_flags(p, with_indices=False)
    _add_solve_flags(p)
    p.add_argument("--traj", required=True)
    p.add_argument("--out", default=None)
    _add_bar_flags(p)

    p = sub.add_parser("cone", help="cone-limit sub-report for a trajectory CSV")
    _add_model_flags(p, with_indices=False)
    p.add_argument("--traj", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--cone-bar", type=float, default=DEFAULT_BARS["cone"])

    p = sub.add_parser("smoothness", help="smoothness sub-report for one orbit")
    _add_model_flags(p, with_indices=False)
    p.add_argument("--orbit", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("report", help="full pipeline for one orbit spec")
    _add_model_flags(p, with_indices=False)
    _add_solve_flags(p)
    p.add_argument("--out", default=None)
    p.add_argument("--traj-out", default=None, help="also write the trajectory CSV")
    _add_bar_flags(p)

    return ap


def cmd_classify(args) -> int:
    model = _model_from_args(args)
    from .homogeneous import classify_invariant_g2

    verdict = classify_invariant_g2(model)
    print(f"model: {model.label}")
    print(f"admissible: {'true' if verdict else 'false'}")
    return 0


def cmd_derive(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    sys_ = derive_flow(model)
    if args.json is not None:
        _emit(sys_.to_json_dict(), args.json)
    else:
        for name in sys_.state:
            print(f"{name}' = {sys_.rhs[name]!r}")
    return 0


def cmd_solve(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    spec = _orbit_spec(args, model.kind)
    cfg = _config(args)
    sys_ = derive_flow(model)
    traj, _ = solve_orbit(sys_, spec, cfg)
    traj.to_csv(args.out)
    print(f"wrote {traj.n_samples} samples to {args.out} (status: {traj.status})")
    return 0


def _bars_verdict(doc: dict, failures: list) -> int:
    doc["bars_failed"] = failures
    doc["passed"] = not failures
    return 1 if failures else 0


def cmd_verify(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    spec = _orbit_spec(args, model.kind)
    traj = Trajectory.from_csv(args.traj, model.kind)
    sys_ = derive_flow(model)
    struct = build_invariant_structure(model)
    cert = kaehler_search(model, sys_)
    prof = profile(model, spec)
    closure = check_closure_samples(traj, struct, cert)
    cone = cone_fit(traj)
    smooth = smoothness_report(model, spec.orbit, sys_)
    su4 = su4_family_check(model, sys_, cert)
    deviation = compare(traj, prof)
    closure_bar = (
        args.closure_bar
        if args.closure_bar is not None
        else DEFAULT_BARS["closure_trajectory"]
    )
    doc = {
        "model": model.label,
        "orbit": spec.orbit,
        "closure_residual": {
            "d_omega": closure.d_omega_residual,
            "d_eta": closure.d_eta_residual,
            "n_samples": closure.n_samples,
            "mode": "raw-samples",
        },
        "cone": {
            "limits": cone.limits,
            "refs": cone.refs,
            "deltas": cone.deltas,
            "endpoint": cone.endpoint,
        },
        "kaehler": {"signs": list(cert.signs)},
        "smoothness": smooth.to_json_dict(),
        "su4_certificate": su4.passed,
        "closed_form_deviation": deviation,
        "bars": {
            "closure": closure_bar,
            "cone": args.cone_bar,
            "closed_form": args.closed_form_bar,
        },
    }
    doc["cone"]["partial"] = cone.partial
    failures = []
    if closure.max_residual > closure_bar:
        failures.append("closure")
    if cone.max_delta > args.cone_bar and not cone.partial:
        failures.append("cone")
    if deviation > args.closed_form_bar:
        failures.append("closed_form")
    if not su4.passed:
        failures.append("su4")
    code = _bars_verdict(doc, failures)
    _emit(doc, args.out)
    return code


def cmd_cone(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    traj = Trajectory.from_csv(args.traj, model.kind)
    cone = cone_fit(traj)
    doc = {
        "model": model.label,
        "cone": {
            "limits": cone.limits,
            "refs": cone.refs,
            "deltas": cone.deltas,
            "endpoint": cone.endpoint,
            "corrections": cone.corrections,
            "partial": cone.partial,
        },
        "bars": {"cone": args.cone_bar},
    }
    failed = ["cone"] if cone.max_delta > args.cone_bar and not cone.partial else []
    code = _bars_verdict(doc, failed)
    _emit(doc, args.out)
    return code


def cmd_smoothness(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    try:
        rep = smoothness_report(model, args.orbit)
    except VerifyError as exc:
        raise InputError(str(exc)) from exc
    doc = {"model": model.label, "orbit": args.orbit, "smoothness": rep.to_json_dict()}
    _emit(doc, args.out)
    return 0


def cmd_report(args) -> int:
    model = get_model(args.model, (1, 1, 1) if args.model.upper() == "Q" else (1, 1))
    spec = _orbit_spec(args, model.kind)
    cfg = _config(args)
    report, traj = run_report(model, spec, cfg)
    if args.traj_out:
        traj.to_csv(args.traj_out)
    doc = report.to_json_dict()
    closure_bar = (
        args.closure_bar if args.closure_bar is not None else DEFAULT_BARS["closure"]
    )
    doc["bars"] = {
        "closure": closure_bar,
        "cone": args.cone_bar,
        "closed_form": args.closed_form_bar,
    }
    failures = []
    if report.closure.max_residual > closure_bar:
        failures.append("closure")
    if report.cone.max_delta > args.cone_bar and not report.cone.partial:
        failures.append("cone")
    if report.closed_form_deviation > args.closed_form_bar:
        failures.append("closed_form")
    if not report.su4.passed:
        failures.append("su4")
    code = _bars_verdict(doc, failures)
    _emit(doc, args.out)
    return code


COMMANDS = {
    "classify": cmd_classify,
    "derive": cmd_derive,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "cone": cmd_cone,
    "smoothness": cmd_smoothness,
    "report": cmd_report,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ModelError, VerifyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
