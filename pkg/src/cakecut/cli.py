"""Command line: ``cakecut run | counterexample | validate``.

Exit status 0 means the scenario ran, whatever it found (a dominated
allocation or a degenerate procedure is a finding).  Status 2 means the
input or the invocation was bad.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .procedures import PROCEDURES
from .report import run_scenario
from .scenario import (
    CHECKS,
    ProcedureSpec,
    ScenarioError,
    builtin_counterexample,
    parse_scenario,
)

EXIT_OK = 0
EXIT_INPUT = 2


def _checks(text: str) -> tuple[str, ...]:
    names = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = [c for c in names if c not in CHECKS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown check(s) {', '.join(bad)}; choose from {', '.join(CHECKS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cakecut", description="Exact cake-cutting procedures and audits.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("file", type=Path)
    run.add_argument("--procedure", choices=PROCEDURES, help="override the scenario's procedure")
    run.add_argument("--check", type=_checks, help="comma-separated checks, replacing the scenario's")
    run.add_argument("--format", choices=("text", "json"), default="text")

    ce = sub.add_parser("counterexample", help="run a built-in counterexample")
    ce.add_argument("id", type=int, choices=(1, 2, 3))
    ce.add_argument("--format", choices=("text", "json"), default="text")

    val = sub.add_parser("validate", help="parse and validate a scenario file")
    val.add_argument("file", type=Path)
    return parser


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            s = _load(args.file)
            print(f"ok: {s.name} ({len(s.players)} players)")
            return EXIT_OK
        if args.command == "counterexample":
            s = builtin_counterexample(args.id)
        else:
            s = _load(args.file)
            if args.procedure:
                order = s.procedure.order if s.procedure else None
                s = replace(s, procedure=ProcedureSpec(args.procedure, order))
            if args.check is not None:
                s = replace(s, checks=args.check)
        report = run_scenario(s)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report.render(args.format))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
