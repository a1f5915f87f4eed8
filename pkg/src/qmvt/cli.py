"""Command-line front end.

Subcommands::

    qmvt verify  <file>                     JSON report on stdout
    qmvt density <file> --points N          CSV table x,density,cdf
    qmvt sample  <file> --count N --seed S  one draw per line
    qmvt report  [--json]                   regression suite and erratum flags

Exit codes: 0 verified with every hypothesis check passing, 1 identity
failure, 2 hypothesis failure, 3 input error.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

import numpy as np

from .bridge import BridgeDistribution, bridge, distorted_bridge, lorenz, nbu_bridge, sample
from .exceptions import (
    DegenerateBridgeError,
    DivergenceError,
    DomainError,
    HypothesisError,
    QMVTError,
    SamplingRefusedError,
)
from .scenario import Scenario, load_scenario
from .suite import erratum_flags, run_suite, suite_report
from .verify import VerificationReport, run_scenario

__all__ = ["EXIT_HYPOTHESIS", "EXIT_IDENTITY", "EXIT_INPUT", "EXIT_OK", "build_bridge", "exit_code", "main", "main_entry"]

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_HYPOTHESIS = 2
EXIT_INPUT = 3

# precondition failures detected while building an object count as hypothesis failures
_HYPOTHESIS_ERRORS = (HypothesisError, DegenerateBridgeError, DomainError, SamplingRefusedError)


def exit_code(report: VerificationReport) -> int:
    if not report.hypotheses_hold:
        return EXIT_HYPOTHESIS
    if not report.verified:
        return EXIT_IDENTITY
    return EXIT_OK


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def build_bridge(scenario: Scenario) -> BridgeDistribution:
    """The bridge a scenario describes; taylor scenarios have none."""
    p = scenario.params
    tol = scenario.numerics.tol_quad
    if scenario.kind == "mvt":
        return bridge(p["lower"], p["upper"], tol=tol)
    if scenario.kind == "theorem1":
        return distorted_bridge(scenario.base, p["h"], p["l"], tol=tol)
    if scenario.kind == "theorem2":
        return nbu_bridge(scenario.base, p["h"], p["t"], tol=tol)
    if scenario.kind == "lorenz":
        return lorenz(scenario.base, tol=tol)
    raise _InputError(f"a {scenario.kind} scenario does not define a bridge distribution")


class _InputError(Exception):
    pass


def _cmd_verify(args, out: TextIO) -> int:
    report = run_scenario(load_scenario(args.file))
    out.write(report.to_json(indent=2) + "\n")
    return exit_code(report)


def _cmd_density(args, out: TextIO) -> int:
    if args.points < 2:
        raise _InputError("--points must be at least 2")
    B = build_bridge(load_scenario(args.file))
    if not B.sampleable:
        print(f"warning: {B.label} violates the stochastic order; density has negative values", file=sys.stderr)
    x = (np.arange(args.points) + 0.5) / args.points
    dens, cdf = B.density(x), B.cdf(x)
    out.write("x,density,cdf\n")
    for row in zip(x, dens, cdf):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return EXIT_OK


def _cmd_sample(args, out: TextIO) -> int:
    if args.count < 0:
        raise _InputError("--count must be nonnegative")
    if args.seed < 0:
        raise _InputError("--seed must be nonnegative")
    B = build_bridge(load_scenario(args.file))
    for v in sample(B, args.count, args.seed):
        out.write(_fmt(v) + "\n")
    return EXIT_OK


def _cmd_report(args, out: TextIO) -> int:
    if args.json:
        out.write(json.dumps(suite_report(), indent=2, allow_nan=False) + "\n")
        return EXIT_OK
    rows = run_suite()
    head = f"{'scenario':36s} {'lhs':>19s} {'rhs':>19s} {'residual':>9s} {'boundary':>9s}  hyp  ok"
    out.write(head + "\n" + "-" * len(head) + "\n")
    for row in rows:
        r = row.report
        out.write(
            f"{row.label:36s} {r.lhs:19.12g} {r.rhs:19.12g} {r.residual_abs:9.2e} {r.boundary_term:9.3g}"
            f"  {'yes' if r.hypotheses_hold else 'NO ':3s}  {'yes' if r.verified else 'NO'}\n"
        )
    flags = erratum_flags()
    out.write(f"\nerratum flags raised: {sum(f.raised for f in flags)} of {len(flags)}\n")
    for f in flags:
        mark = "RAISED" if f.raised else "clear "
        out.write(f"  [{mark}] {f.key}: {f.description}\n           stated {f.stated:.12g}, derived {f.derived:.12g}\n")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmvt", description="Quantile-based mean value identities: verification tools.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="verify the identity a scenario file describes")
    v.add_argument("file")
    d = sub.add_parser("density", help="tabulate the bridge density and CDF")
    d.add_argument("file")
    d.add_argument("--points", type=int, required=True)
    s = sub.add_parser("sample", help="draw from the bridge distribution")
    s.add_argument("file")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    r = sub.add_parser("report", help="run the built-in regression suite")
    r.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    return p


_COMMANDS = {"verify": _cmd_verify, "density": _cmd_density, "sample": _cmd_sample, "report": _cmd_report}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; that is an input error here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return _COMMANDS[args.command](args, out)
    except _HYPOTHESIS_ERRORS as exc:
        print(f"qmvt: hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except DivergenceError as exc:
        print(f"qmvt: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (_InputError, QMVTError, ValueError) as exc:
        print(f"qmvt: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
