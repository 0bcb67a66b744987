"""Command-line entry point: ``poisson-deform``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .report import emit, run
from .scenario import (ALL_CHECKS, FIXTURES, MAX_ORDER, ScenarioError,
                       fixture_text, parse_scenario, print_scenario)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(source: str) -> str:
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    if source in FIXTURES:
        return fixture_text(source)
    raise ScenarioError("no such file or bundled fixture: %s" % source)


def _load(source, args):
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    try:
        return parse_scenario(_read(source), order=args.order, checks=checks,
                              echo_order=args.echo_order, max_order=args.max_order)
    except ScenarioError as exc:
        raise ScenarioError("%s: %s" % (source, exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="poisson-deform",
        description="Order-by-order deformations induced by holomorphic Poisson structures.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run scenarios and verify the selected checks")
    r.add_argument("scenarios", nargs="+", help="scenario JSON files or bundled fixture names")
    r.add_argument("--order", type=int, help="truncation order (overrides the file)")
    r.add_argument("--max-order", type=int, default=MAX_ORDER, help="refuse orders above this")
    r.add_argument("--checks", help="comma-separated subset of: " + ", ".join(ALL_CHECKS))
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--echo-order", type=int, help="echo beta_k and phi_k up to this order")
    r.add_argument("--verify-only", action="store_true", help="report checks only, no echo")
    r.add_argument("--timing", action="store_true", help="include timings in json output")
    r.add_argument("--jobs", type=int, default=1, help="run scenarios in parallel")
    r.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("fixtures", help="list bundled fixtures")
    s = sub.add_parser("show", help="print a scenario in canonical form")
    s.add_argument("scenario")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fixtures":
        print("\n".join(FIXTURES))
        return EXIT_OK
    if args.command == "show":
        try:
            print(print_scenario(parse_scenario(_read(args.scenario))), end="")
        except ScenarioError as exc:
            print("error: %s" % exc, file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.order is not None and args.order < 1:
        print("error: --order must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        scenarios = [_load(src, args) for src in args.scenarios]
    except ScenarioError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT

    if args.jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run, scenarios))
    else:
        reports = [run(s) for s in scenarios]

    timing = args.timing if args.format == "json" else not args.verify_only or args.timing
    sys.stdout.write(emit(reports, args.format, timing=timing, verify_only=args.verify_only))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
