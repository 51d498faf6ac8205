"""Command line entry point: ``dual-bbgky run | list-checks | validate``.

Exit codes: 0 when every record passes, 1 when any check fails, 2 on
configuration or capacity errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from ..errors import CapacityError, ConfigParseError, ValidationError
from .checks import CHECKS
from .report import emit_report, run_scenario
from .scenario import load_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parse_checks(value: str) -> list:
    ids = [c.strip() for c in value.split(",") if c.strip()]
    unknown = [c for c in ids if c not in CHECKS]
    if unknown:
        raise ValidationError("--checks", f"unknown check id {unknown[0]!r}; valid ids: {', '.join(CHECKS)}")
    return ids


def _parse_seed(value: str) -> int:
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dual-bbgky", description="Numerical verification of dual BBGKY hierarchy identities.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the checks of a scenario file")
    run.add_argument("scenario", type=Path)
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--out", type=Path, help="write the report here; plot data and figures go next to it")
    run.add_argument("--checks", help="comma-separated check ids, replacing the scenario's list")
    run.add_argument("--seed", type=_parse_seed, help="override the scenario seed")
    run.add_argument("--deterministic", action="store_true", help="omit wall times so reports are byte-identical")
    run.add_argument("--no-figures", action="store_true", help="write plot data tables but no PNG figures")

    sub.add_parser("list-checks", help="list check ids with their default tolerances")

    val = sub.add_parser("validate", help="parse and validate a scenario file")
    val.add_argument("scenario", type=Path)
    return ap


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.checks is not None:
        scenario = dataclasses.replace(scenario, checks=_parse_checks(args.checks))
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
        scenario.spec_for(0)
    report = run_scenario(scenario, deterministic=args.deterministic)
    data = emit_report(report, args.format)
    if args.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        from .plotting import write_plot_data

        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(data)
        stem = args.out.with_suffix("")
        for p in write_plot_data(report, stem, figures=not args.no_figures):
            print(f"wrote {p}", file=sys.stderr)
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_list_checks(args) -> int:
    for cid, info in CHECKS.items():
        tol = "per-record" if info.tolerance != info.tolerance else f"{info.tolerance:.0e}"
        print(f"{cid}\t{tol}\t{info.anchor}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    s = load_scenario(args.scenario)
    spec = s.spec_for(0)
    print(f"{args.scenario}: ok (d={spec.d}, N={spec.N}, {len(s.checks)} checks, {s.instances} instances)")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "list-checks": _cmd_list_checks, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigParseError, ValidationError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
