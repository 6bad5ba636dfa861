"""
Command-line front end.

    multient state SPEC.json [--out FILE]
    multient report SPEC.json [--partition LABEL|all] [--out FILE]
    multient sweep SWEEP.json --out FILE [--jobs N]
    multient verify [--grid coarse|fine] [--tol TOL] [--jobs N]

Exit codes: 0 ok, 1 verification failed, 2 usage or malformed input,
3 unphysical covariance, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .gaussian import covariance_to_json, parse_partition, validate_covariance
from .states import FAMILY_MODES, build_state, family_of, load_state_spec
from .sweep import GRIDS, build_report, load_sweep_spec, run_sweep, timed_verify, write_csv

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_UNPHYSICAL = 3
EXIT_IO = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_params(path):
    try:
        return load_state_spec(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(f"malformed state spec: {exc}", EXIT_USAGE) from None


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}", EXIT_IO) from None


def cmd_state(args) -> int:
    params = _load_params(args.spec)
    v, _ = build_state(params)
    rep = validate_covariance(v)
    if not rep.physical:
        raise CliError(f"unphysical covariance (min eig of V + i Omega = {rep.min_eig_of_V_plus_iOmega:.3e})",
                       EXIT_UNPHYSICAL)
    _emit(json.dumps(covariance_to_json(v), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    params = _load_params(args.spec)
    parts = None
    if args.partition != "all":
        try:
            parts = [parse_partition(args.partition, FAMILY_MODES[family_of(params)])]
        except ValueError as exc:
            raise CliError(f"unknown partition {args.partition!r}: {exc}", EXIT_USAGE) from None
    report = build_report(params, parts)
    if family_of(params) == "sq4":
        report["note"] = "no variance-bound suite for the square state; verdicts are PPT only"
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = load_sweep_spec(args.sweep)
    except OSError as exc:
        raise CliError(f"cannot read {args.sweep}: {exc.strerror}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(f"malformed sweep spec: {exc}", EXIT_USAGE) from None
    try:
        fh = open(args.out, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from None
    with fh:
        write_csv(run_sweep(spec, jobs=args.jobs), fh)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks, elapsed = timed_verify(grid=args.grid, tol=args.tol, fault=args.inject_fault, jobs=args.jobs)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{'FAILED: ' + ', '.join(failed) if failed else 'all checks passed'} ({elapsed:.2f} s, grid {args.grid})")
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return val


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multient", description="Multimode Gaussian entanglement from concurrent parametric processes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="print the covariance of a state spec as JSON")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("report", help="PPT and variance-bound report for a state spec")
    p.add_argument("spec")
    p.add_argument("--partition", default="all", help='Alice set, e.g. "1,3", "{1,3}" or "P13"; default all')
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="evaluate a 2-D parameter grid to CSV")
    p.add_argument("sweep")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the numerical cross-checks")
    p.add_argument("--grid", choices=sorted(GRIDS), default="coarse")
    p.add_argument("--tol", type=float, default=1e-8, help="oracle-vs-factory tolerance (relative to max(1, max|V|))")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--inject-fault", choices=["squeeze-sign"], default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"multient: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
