"""Command line entry point: ``arcforge run`` and ``arcforge census``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .pipeline import FORMATS, RunConfig, census_report, read_catalog, run_batch
from .spantree import DEFAULT_BUDGET, HEURISTICS

EXIT_OK, EXIT_PARTIAL, EXIT_FATAL = 0, 1, 2


def _formats(text: str) -> tuple[str, ...]:
    items = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in items if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {','.join(FORMATS)}")
    return items


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arcforge", description="DT codes to grid diagrams")
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="convert every knot of a DT file")
    run.add_argument("--in", dest="input", required=True, type=Path, help="DT file, one knot per line")
    run.add_argument("--out", required=True, type=Path, help="output directory")
    run.add_argument("--verify", action="store_true", help="attach invariant reports")
    run.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="search nodes per attempt")
    run.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    run.add_argument("--format", type=_formats, default=("svg",), help="comma list of ascii,svg,intervals")
    run.add_argument("--all-target-pairs", action="store_true", help="also try pairs sharing a region")
    run.add_argument("--tree-heuristic", choices=HEURISTICS, default="lex")
    run.add_argument("--no-fallback", action="store_true", help="skip the one- and zero-target retries")
    run.add_argument("--spokes", action="store_true", help="write <name>.spokes debug dumps")

    census = sub.add_parser("census", help="summarize a catalog against the reference table")
    census.add_argument("--catalog", required=True, type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "census":
            sys.stdout.write(census_report(read_catalog(args.catalog)))
            return EXIT_OK
        cfg = RunConfig(
            input=args.input,
            out=args.out,
            formats=args.format,
            budget=args.budget,
            jobs=args.jobs,
            verify=args.verify,
            fallback=not args.no_fallback,
            all_target_pairs=args.all_target_pairs,
            heuristic=args.tree_heuristic,
            write_spokes=args.spokes,
        )
        catalog, summary = run_batch(cfg)
    except (OSError, ValueError) as err:
        print(f"arcforge: {err}", file=sys.stderr)
        return EXIT_FATAL
    sys.stdout.write(summary.text())
    for rec in catalog:
        if "error" in rec:
            print(f"line {rec['line']}: {rec['name'] or '?'}: {rec['error']}: {rec['message']}", file=sys.stderr)
    return EXIT_OK if summary.ok else EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
