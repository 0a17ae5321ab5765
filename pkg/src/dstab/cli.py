"""Command-line front end.

Usage:
    dstab analyze  problem.json [--json] [--solver-tol T] [--max-iter K] [--seed S]
                                [--no-oracle] [--shared-p]
    dstab sample   problem.json [--json] [--grid G] [--random R] [--seed S]
                                [--edge-density D] [--no-corners]
    dstab roots-csv problem.json [-o out.csv] [plan flags]

Exit codes: 0 certified / no violation, 1 falsified, 2 undetermined,
3 input error.  DSTAB_SEED provides the default seed when neither a flag
nor the problem file sets one.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .pipeline import EXIT_INPUT_ERROR, run_analyze, run_roots_csv, run_sample
from .problem import ProblemFormatError, load_problem


def _seed_default() -> int:
    raw = os.environ.get("DSTAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ProblemFormatError(f"DSTAB_SEED must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dstab",
                                     description="Robust D-stability analysis of uncertain polynomial matrix families.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="LMI certificate plus sampling cross-check")
    analyze.add_argument("file", type=Path, help="problem JSON file")
    analyze.add_argument("--solver-tol", type=float, default=None, help="verified margin tolerance")
    analyze.add_argument("--max-iter", type=int, default=None, help="solver iteration budget")
    analyze.add_argument("--seed", type=int, default=None)
    analyze.add_argument("--no-oracle", action="store_true", help="skip the sampling cross-check")
    analyze.add_argument("--shared-p", action="store_true", help="one shared positive block for all vertices (stricter)")
    analyze.add_argument("--json", action="store_true", help="machine-readable report on stdout")

    sample = sub.add_parser("sample", help="sampling falsifier only")
    sample.add_argument("file", type=Path)
    sample.add_argument("--grid", type=int, default=None, help="grid points per box axis")
    sample.add_argument("--random", type=int, default=None, help="random samples")
    sample.add_argument("--seed", type=int, default=None)
    sample.add_argument("--edge-density", type=int, default=None, help="edge subdivisions (polytopic)")
    sample.add_argument("--no-corners", action="store_true", help="skip box corners")
    sample.add_argument("--json", action="store_true")

    roots = sub.add_parser("roots-csv", help="emit the sampled root loci as CSV")
    roots.add_argument("file", type=Path)
    roots.add_argument("-o", "--out", type=Path, default=None, help="output path (default stdout)")
    roots.add_argument("--grid", type=int, default=None)
    roots.add_argument("--random", type=int, default=None)
    roots.add_argument("--seed", type=int, default=None)
    roots.add_argument("--edge-density", type=int, default=None)
    roots.add_argument("--no-corners", action="store_true")
    return parser


def _plan_overrides(args) -> dict:
    return {
        "grid_per_axis": args.grid,
        "random_count": args.random,
        "seed": args.seed,
        "edge_density": args.edge_density,
        "include_corners": False if args.no_corners else None,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        seed_default = _seed_default()
        problem = load_problem(args.file)
        if args.command == "analyze":
            outcome = run_analyze(
                problem,
                seed_default=seed_default,
                margin_tol=args.solver_tol,
                max_iter=args.max_iter,
                seed=args.seed,
                no_oracle=args.no_oracle,
                shared_p=True if args.shared_p else None,
            )
            if args.json:
                print(json.dumps(outcome.to_dict(), indent=2))
            else:
                print("\n".join(outcome.human_lines()))
            return outcome.exit_code
        if args.command == "sample":
            outcome = run_sample(problem, seed_default=seed_default, **_plan_overrides(args))
            if args.json:
                print(json.dumps(outcome.to_dict(), indent=2))
            else:
                print("\n".join(outcome.human_lines()))
            return outcome.exit_code
        text = run_roots_csv(problem, seed_default=seed_default, **_plan_overrides(args))
        if args.out is None:
            sys.stdout.write(text)
        else:
            try:
                args.out.write_text(text, encoding="utf-8", newline="")
            except OSError as exc:
                print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
                return EXIT_INPUT_ERROR
        return 0
    except (ProblemFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
