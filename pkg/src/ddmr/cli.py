"""The ddmr command line: extension, query, validate, diff, bench.

Exit codes are script-friendly and stable:

    0  success (for query: Proved)
    1  validation errors
    2  parse errors / unreadable input
    3  query answered Refuted
    4  query answered Undetermined
    5  --oracle cross-check found a mismatch
    6  query subject unknown to the theory

The oracle size cap defaults to 200 and can be overridden through the
DDMR_ORACLE_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import run_benchmarks, to_csv
from .conflicts import Variant
from .engine import (
    PROVED,
    REFUTED,
    UNDETERMINED,
    UNKNOWN_SUBJECT,
    compute_extension,
    diff_variants,
    query,
)
from .generate import FAMILIES
from .model import validate
from .oracle import DEFAULT_BUDGET, OracleBudgetError, check_equivalence
from .text import (
    TheorySyntaxError,
    parse_tagged_formula,
    parse_theory,
    render_extension,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_REFUTED = 3
EXIT_UNDETERMINED = 4
EXIT_ORACLE_MISMATCH = 5
EXIT_UNKNOWN_SUBJECT = 6


def _oracle_budget() -> int:
    raw = os.environ.get("DDMR_ORACLE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"DDMR_ORACLE_BUDGET must be an integer, got {raw!r}")


def _load_theory(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    try:
        return parse_theory(source)
    except TheorySyntaxError as exc:
        for error in exc.errors:
            print(f"{path}:{error}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _check_valid(theory) -> None:
    report = validate(theory)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if report.errors:
        for error in report.errors:
            print(f"error: {error}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _cross_check(theory, variant) -> None:
    try:
        diffs = check_equivalence(theory, variant, budget=_oracle_budget())
    except OracleBudgetError as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    if diffs:
        for name, (engine_only, oracle_only) in sorted(diffs.items()):
            print(
                f"oracle mismatch in {name}: engine-only "
                f"{sorted(map(str, engine_only))}, oracle-only "
                f"{sorted(map(str, oracle_only))}",
                file=sys.stderr,
            )
        raise SystemExit(EXIT_ORACLE_MISMATCH)


def cmd_extension(args) -> int:
    theory = _load_theory(args.path)
    _check_valid(theory)
    variant = Variant(args.variant)
    extension = compute_extension(theory, variant)
    if args.oracle:
        _cross_check(theory, variant)
    sys.stdout.write(render_extension(extension, args.format))
    return EXIT_OK


def cmd_query(args) -> int:
    theory = _load_theory(args.path)
    _check_valid(theory)
    variant = Variant(args.variant)
    try:
        formula = parse_tagged_formula(args.formula)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    if args.oracle:
        _cross_check(theory, variant)
    answer = query(theory, variant, formula)
    print(answer)
    return {
        PROVED: EXIT_OK,
        REFUTED: EXIT_REFUTED,
        UNDETERMINED: EXIT_UNDETERMINED,
        UNKNOWN_SUBJECT: EXIT_UNKNOWN_SUBJECT,
    }[answer]


def cmd_validate(args) -> int:
    theory = _load_theory(args.path)
    report = validate(theory)
    for error in report.errors:
        print(f"error: {error}")
    for warning in report.warnings:
        print(f"warning: {warning}")
    if report.ok and not report.warnings:
        print("ok")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_diff(args) -> int:
    theory = _load_theory(args.path)
    _check_valid(theory)
    rows = diff_variants(theory)
    for mode, meta, subject, simple, cautious in rows:
        level = "rule" if meta else "literal"
        print(f"{level} {mode} {subject}: simple={simple} cautious={cautious}")
    if not rows:
        print("no differences")
    return EXIT_OK


def cmd_bench(args) -> int:
    families = args.family or list(FAMILIES)
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else []
    variants = [Variant(args.variant)] if args.variant_only else list(Variant)
    records = run_benchmarks(families, sizes, seed=args.seed, variants=variants)
    text = to_csv(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddmr",
        description="Defeasible deontic meta-rule reasoner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, oracle: bool = True):
        p.add_argument("path", help="theory file (.ddl)")
        p.add_argument(
            "--variant",
            choices=[v.value for v in Variant],
            default=Variant.CAUTIOUS.value,
            help="conflict reading (default: cautious)",
        )
        if oracle:
            p.add_argument(
                "--oracle",
                action="store_true",
                help="cross-check the engine against the proof-condition oracle",
            )

    p_ext = sub.add_parser("extension", help="compute and print the extension")
    common(p_ext)
    p_ext.add_argument("--format", choices=("json", "text"), default="text")
    p_ext.set_defaults(func=cmd_extension)

    p_query = sub.add_parser("query", help="decide one tagged formula")
    common(p_query)
    p_query.add_argument("formula", help="e.g. '+dO a', '-dmC ~gamma'")
    p_query.set_defaults(func=cmd_query)

    p_val = sub.add_parser("validate", help="report structural errors and warnings")
    p_val.add_argument("path", help="theory file (.ddl)")
    p_val.set_defaults(func=cmd_validate)

    p_diff = sub.add_parser("diff", help="compare the two conflict variants")
    p_diff.add_argument("path", help="theory file (.ddl)")
    p_diff.set_defaults(func=cmd_diff)

    p_bench = sub.add_parser("bench", help="generate, run and time theory families")
    p_bench.add_argument("--family", action="append", choices=FAMILIES)
    p_bench.add_argument("--sizes", default="", help="comma-separated size targets")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument(
        "--variant",
        choices=[v.value for v in Variant],
        default=Variant.CAUTIOUS.value,
    )
    p_bench.add_argument(
        "--variant-only",
        action="store_true",
        help="bench only --variant instead of both",
    )
    p_bench.add_argument("--out", help="write CSV here instead of stdout")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
