"""Command-line front end.

Usage examples:
  dualframe validate --povm tetra.json
  dualframe dual --povm mub6.json --kind optimal --ensemble skewed.json -o dual.json
  dualframe noise --min --povm mub6.json --ensemble skewed.json --observable sz.json
  dualframe simulate --povm z.json --ensemble plus.json --observable sz.json \\
      --shots 100000 --reps 100 --seed 7 --mode per_state
  dualframe check --povm mub6.json --dual dual.json --ensemble skewed.json

Every invocation prints one JSON document (or writes it to --output).
Exit status: 0 success, 1 domain failure, 2 unreadable input.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import fields, replace

from . import fileio
from .errors import DualFrameError, FormatError, InvalidDual, InvalidPovm
from .estimation import (
    build_lambda,
    check_min_norm_condition,
    gamma_from_dual,
    min_noise,
    noise,
    optimal_dual,
    outcome_weights,
    verify_identity_eq15,
)
from .frames import analyze_frame, verify_dual
from .hs import is_informationally_complete, make_ensemble, require_in_span, span_basis, validate_povm
from .simulator import MODES, run_experiment
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2
SEED_ENV = "DUALFRAME_SEED"


class _Failure(Exception):
    """Carries a finished report together with a nonzero exit status."""

    def __init__(self, report: dict, status: int = EXIT_DOMAIN):
        self.report = report
        self.status = status


def _clean(obj):
    """Replace non-finite floats by None so output stays valid JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _tolerances(args) -> Tolerances:
    overrides = {f.name: getattr(args, f"tol_{f.name}") for f in fields(Tolerances)
                 if getattr(args, f"tol_{f.name}", None) is not None}
    return replace(DEFAULT, **overrides)


# Inputs are all read before any computation so that a bad path fails fast.

def _load(args, *, observable=False, ensemble=False, dual=False):
    loaded = {"povm": fileio.read_povm(args.povm)}
    if ensemble:
        loaded["ensemble"] = fileio.read_ensemble(args.ensemble)
    if observable:
        loaded["observable"] = fileio.read_operator(args.observable)
    if dual:
        loaded["dual"] = fileio.read_dual(args.dual)
    return loaded


def _resolve_dual(args, povm, span, ens, loaded, tol):
    if args.kind == "canonical":
        return analyze_frame(povm, span, tol).canonical_dual
    if args.kind == "optimal":
        return optimal_dual(povm, ens, span, args.allow_zero, tol)[0]
    return loaded["dual"]


def cmd_validate(args, tol):
    raw = fileio.read_povm(args.povm)
    try:
        povm = validate_povm(raw, tol)
    except InvalidPovm as exc:
        raise _Failure({"valid": False, **exc.to_dict()})
    span = span_basis(povm, tol)
    return {
        "valid": True,
        "n_outcomes": povm.n_outcomes,
        "dim": povm.dim,
        "span_rank": span.rank,
        "informationally_complete": is_informationally_complete(span),
        "warnings": list(povm.warnings),
    }


def cmd_dual(args, tol):
    if args.kind == "optimal" and not args.ensemble:
        raise FormatError("--ensemble is required for --kind optimal")
    loaded = _load(args, ensemble=bool(args.ensemble))
    povm = validate_povm(loaded["povm"], tol)
    ens = make_ensemble(*loaded["ensemble"], tol) if args.ensemble else None
    span = span_basis(povm, tol)
    dual = _resolve_dual(args, povm, span, ens, loaded, tol)
    eq12 = None
    if ens is not None:
        cmap = gamma_from_dual(build_lambda(povm), dual, span, tol)
        eq12 = check_min_norm_condition(cmap, outcome_weights(povm, ens, tol))
    doc = fileio.dual_document(dual)
    doc["diagnostics"] = {"verify_residual": verify_dual(povm, dual, span), "eq12_residual": eq12}
    return doc


def cmd_noise(args, tol):
    if args.kind == "file" and not args.dual:
        raise FormatError("--dual is required for --kind file")
    loaded = _load(args, observable=True, ensemble=True, dual=args.kind == "file")
    povm = validate_povm(loaded["povm"], tol)
    ens = make_ensemble(*loaded["ensemble"], tol)
    x = loaded["observable"]
    span = span_basis(povm, tol)
    require_in_span(span, x, tol)
    if args.min:
        dual = optimal_dual(povm, ens, span, args.allow_zero, tol)[0]
        via_dual = noise(povm, dual, ens, x, span, tol)
        delta, _ = min_noise(povm, ens, x, span, args.allow_zero, tol)
        doc = via_dual.to_dict()
        term2 = via_dual.ensemble_square_term
        doc.update(delta=delta, second_moment_term=delta + term2)
        doc["diagnostics"]["optimal_dual_delta"] = via_dual.delta
        doc["diagnostics"]["cross_check_residual"] = abs(delta - via_dual.delta) / max(1.0, abs(delta))
        return doc
    dual = _resolve_dual(args, povm, span, ens, loaded, tol)
    return noise(povm, dual, ens, x, span, tol).to_dict()


def cmd_simulate(args, tol):
    if args.kind == "file" and not args.dual:
        raise FormatError("--dual is required for --kind file")
    loaded = _load(args, observable=True, ensemble=True, dual=args.kind == "file")
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env is not None else 0
        except ValueError:
            raise FormatError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if seed < 0:
        raise FormatError("seed must be nonnegative")
    povm = validate_povm(loaded["povm"], tol)
    ens = make_ensemble(*loaded["ensemble"], tol)
    span = span_basis(povm, tol)
    x = require_in_span(span, loaded["observable"], tol)
    dual = _resolve_dual(args, povm, span, ens, loaded, tol)
    if args.verbose:
        print(f"simulating {args.reps} replicas of {args.shots} shots", file=sys.stderr)
    result = run_experiment(povm, ens, dual, x, args.shots, args.reps, seed, args.mode, span, tol)
    doc = result.to_dict()
    doc["dual_kind"] = dual.kind
    return doc


def cmd_check(args, tol):
    loaded = _load(args, ensemble=bool(args.ensemble), dual=True)
    povm = validate_povm(loaded["povm"], tol)
    dual = loaded["dual"]
    span = span_basis(povm, tol)
    residuals = {"verify_residual": verify_dual(povm, dual, span), "eq12_residual": None, "eq15_residual": None}
    ok = residuals["verify_residual"] <= tol.dual
    if ok and args.ensemble:
        weights = outcome_weights(povm, make_ensemble(*loaded["ensemble"], tol), tol)
        cmap = gamma_from_dual(build_lambda(povm), dual, span, tol)
        residuals["eq12_residual"] = check_min_norm_condition(cmap, weights)
        residuals["eq15_residual"] = verify_identity_eq15(cmap, span, weights, tol)
        ok = residuals["eq12_residual"] <= tol.dual and residuals["eq15_residual"] <= tol.dual
    report = {"passed": ok, "dual_kind": dual.kind, "residuals": residuals}
    if not ok:
        raise _Failure(report)
    return report


COMMANDS = {
    "validate": cmd_validate,
    "dual": cmd_dual,
    "noise": cmd_noise,
    "simulate": cmd_simulate,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="Write the JSON report here instead of stdout.")
    common.add_argument("-v", "--verbose", action="store_true", help="Progress notes on stderr.")
    for f in fields(Tolerances):
        flag = f"--tol-{f.name.replace('_', '-')}"
        common.add_argument(flag, dest=f"tol_{f.name}", type=float, default=None,
                            help=f"default {f.default:g}")

    ap = argparse.ArgumentParser(prog="dualframe", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Validate a POVM file.")
    p.add_argument("--povm", required=True)

    p = sub.add_parser("dual", parents=[common], help="Compute a canonical or optimal dual frame.")
    p.add_argument("--povm", required=True)
    p.add_argument("--kind", choices=("canonical", "optimal"), default="canonical")
    p.add_argument("--ensemble")
    p.add_argument("--allow-zero", action="store_true", help="Tolerate outcomes with zero weight.")

    for name, helptext in (("noise", "Evaluate the estimation noise for an observable."),
                           ("simulate", "Monte Carlo estimate of the noise.")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--povm", required=True)
        p.add_argument("--ensemble", required=True)
        p.add_argument("--observable", required=True)
        p.add_argument("--kind", choices=("canonical", "optimal", "file"), default="optimal")
        p.add_argument("--dual", help="Dual frame file for --kind file.")
        p.add_argument("--allow-zero", action="store_true")
        if name == "noise":
            p.add_argument("--min", action="store_true",
                           help="Use the closed-form minimum and cross-check it against the optimal dual.")
        else:
            p.add_argument("--shots", type=int, default=100_000)
            p.add_argument("--reps", type=int, default=100)
            p.add_argument("--seed", type=int, default=None, help=f"Falls back to ${SEED_ENV}, then 0.")
            p.add_argument("--mode", choices=MODES, default="per_state")

    p = sub.add_parser("check", parents=[common], help="Check a dual frame file against a POVM.")
    p.add_argument("--povm", required=True)
    p.add_argument("--dual", required=True)
    p.add_argument("--ensemble", help="Also test the minimum-norm conditions for this ensemble.")
    return ap


def _emit(doc: dict, output: str | None) -> None:
    text = fileio.dumps(_clean(doc))
    if output:
        fileio.write_atomic(output, text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = _tolerances(args)
    status = EXIT_OK
    try:
        doc = COMMANDS[args.command](args, tol)
    except _Failure as exc:
        doc, status = exc.report, exc.status
    except FormatError as exc:
        doc, status = exc.to_dict(), EXIT_INPUT
    except DualFrameError as exc:
        doc, status = exc.to_dict(), EXIT_DOMAIN
    if status:
        print(f"dualframe {args.command}: {doc.get('error', 'failed')}", file=sys.stderr)
    doc["tolerances"] = tol.to_dict()
    try:
        _emit(doc, args.output)
    except OSError as exc:
        print(f"dualframe: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return status


if __name__ == "__main__":
    raise SystemExit(main())
