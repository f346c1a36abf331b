"""Command-line application for the hullcheck solvers.

This module is a thin layer over the core solvers: it parses flags, loads
input files, dispatches to :mod:`hullcheck.cli.driver` and writes reports.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from hullcheck import __version__
from hullcheck.cli.bench import (
    BenchRunner,
    halving_table,
    halving_violations,
    render_table,
    write_traces,
)
from hullcheck.cli.config import Mode, RunConfig, Variant
from hullcheck.cli.driver import (
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_POSITIVE,
    exit_code_for,
    run_lp,
    run_membership,
    verdict_for,
)
from hullcheck.cli.generators import Family, GeneratorSpec, generate
from hullcheck.cli.ingest import format_row, ingest_lp, ingest_points, write_instance
from hullcheck.cli.report import build_report, dumps, write_trace
from hullcheck.cli.verify import verify_report
from hullcheck.cli.visibility import visibility_probe
from hullcheck.core.errors import HullcheckError, InvalidInputError
from hullcheck.core.geometry import PivotRule, Tolerances
from hullcheck.utils.constant import HULLCHECK_LOG_LEVEL, HULLCHECK_THREADS


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as input errors (exit 3)."""

    def error(self, message: str) -> NoReturn:
        """Raise instead of exiting with argparse's default status 2.

        Args:
            message: Usage error text.

        Raises:
            InvalidInputError: Always.
        """
        raise InvalidInputError(message)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", default=Variant.TRIANGLE, choices=list(Variant))
    parser.add_argument("--pivot-rule", default=PivotRule.FIRST_INDEX, choices=list(PivotRule))
    parser.add_argument("--eps", type=float, default=1e-3)
    parser.add_argument("--max-iters", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--wall-clock", action="store_true", help="Report wall-clock seconds")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = _Parser(prog="hullcheck", description="Convex hull membership solver")
    parser.add_argument("--version", action="version", version=f"hullcheck {__version__}")
    parser.add_argument("--log-level", default=HULLCHECK_LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Solve one instance and write a JSON report")
    run.add_argument("--points", type=Path)
    run.add_argument("--query", type=Path)
    run.add_argument("--lp-a", type=Path)
    run.add_argument("--lp-b", type=Path)
    run.add_argument("--mode", default=Mode.MEMBERSHIP, choices=list(Mode))
    _add_solver_flags(run)
    run.add_argument("--eps0", type=float, default=1e-2)
    run.add_argument("--k", type=int, default=3)
    run.add_argument("--t", type=int, default=2)
    run.add_argument("--big-m", type=float, default=None)
    run.add_argument("--mu-cap", type=float, default=1024.0)
    run.add_argument("--halving", action="store_true", help="Halve eps from 0.5 down to --eps")
    run.add_argument("--visibility-samples", type=int, default=0)
    run.add_argument("--out", type=Path)
    run.add_argument("--trace-out", type=Path)

    bench = sub.add_parser("bench", help="Compare variants on generated instances")
    bench.add_argument("--family", default=Family.FEASIBLE, choices=list(Family))
    bench.add_argument("--count", type=int, default=10)
    bench.add_argument("--m", type=int, default=2)
    bench.add_argument("--n", type=int, default=5)
    bench.add_argument("--shift", type=float, default=0.1)
    bench.add_argument("--rho", type=float, default=0.25)
    bench.add_argument("--variants", default="triangle,greedy")
    _add_solver_flags(bench)
    bench.add_argument("--check-halvings", default="", help="Comma list of L for the 7L check")
    bench.add_argument("--out", type=Path)
    bench.add_argument("--trace-dir", type=Path)

    probe = sub.add_parser("probe", help="Sample visibility constants")
    probe.add_argument("--points", type=Path, required=True)
    probe.add_argument("--query", type=Path, required=True)
    probe.add_argument("--eps", type=float, default=1e-2)
    probe.add_argument("--samples", type=int, default=100_000)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--out", type=Path)

    verify = sub.add_parser("verify", help="Re-check a report against its inputs")
    verify.add_argument("--report", type=Path, required=True)
    verify.add_argument("--points", type=Path)
    verify.add_argument("--query", type=Path)
    verify.add_argument("--lp-a", type=Path)
    verify.add_argument("--lp-b", type=Path)
    verify.add_argument("--big-m", type=float, default=None, help="M of a bounded-M run")
    verify.add_argument("--mu-cap", type=float, default=None, help="Cap of a doubling run")

    table = sub.add_parser("table", help="Print iterations needed for 2^-L gap reduction")
    table.add_argument("--nu", default="0.5,0.75,0.9,0.99")
    table.add_argument("--halvings", default="10,20")

    gen = sub.add_parser("generate", help="Write a generated instance as CSV files")
    gen.add_argument("--family", default=Family.FEASIBLE, choices=list(Family))
    gen.add_argument("--m", type=int, default=2)
    gen.add_argument("--n", type=int, default=5)
    gen.add_argument("--shift", type=float, default=0.1)
    gen.add_argument("--rho", type=float, default=0.25)
    gen.add_argument("--index", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", type=Path, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Build a :class:`RunConfig` from parsed ``run`` flags."""
    extra = {} if args.max_iters is None else {"max_iters": args.max_iters}
    return RunConfig(
        variant=args.variant,
        pivot_rule=args.pivot_rule,
        eps=args.eps,
        eps0=args.eps0,
        k=args.k,
        t=args.t,
        seed=args.seed,
        mode=args.mode,
        big_m=args.big_m,
        mu_cap=args.mu_cap,
        halving=args.halving,
        wall_clock=args.wall_clock,
        **extra,
    )


def _require(*paths: tuple[str, Path | None]) -> None:
    missing = [flag for flag, path in paths if path is None]
    if missing:
        msg = f"missing required flags: {', '.join(missing)}"
        raise InvalidInputError(msg)


def cmd_run(args: argparse.Namespace) -> int:
    """Solve one instance; the exit code encodes the outcome."""
    config = config_from_args(args)
    started = time.perf_counter()
    visibility = None
    if config.mode.is_lp:
        _require(("--lp-a", args.lp_a), ("--lp-b", args.lp_b))
        a, b = ingest_lp(args.lp_a, args.lp_b)
        outcome, stats = run_lp(config, a, b)
        inputs = {"lp_a": str(args.lp_a), "lp_b": str(args.lp_b)}
    else:
        _require(("--points", args.points), ("--query", args.query))
        points, query = ingest_points(args.points, args.query)
        outcome, stats = run_membership(config, points, query)
        inputs = {"points": str(args.points), "query": str(args.query)}
        if args.visibility_samples > 0:
            probe = visibility_probe(
                points, query, config.eps, args.visibility_samples, config.seed, stats=stats
            )
            visibility = probe.to_dict()
    elapsed = time.perf_counter() - started

    timings: dict[str, float | int] = {
        "iterations": stats.iterations,
        "pivot_scans": stats.pivot_scans,
    }
    if config.wall_clock:
        timings["wall_seconds"] = elapsed
    report = build_report(
        verdict=verdict_for(outcome),
        outcome=outcome.to_dict(),
        stats=stats,
        config=config.to_dict(),
        inputs=inputs,
        visibility=visibility,
        timings=timings,
    )
    _emit(dumps(report), args.out)
    if args.trace_out is not None:
        write_trace(args.trace_out, stats)
    logging.info("Run finished: %s (%d steps)", report["verdict"], stats.iterations)
    return exit_code_for(outcome)


def cmd_bench(args: argparse.Namespace) -> int:
    """Run the variant comparison table; exit 1 when a 7L check fails."""
    spec = GeneratorSpec(
        family=args.family, count=args.count, m=args.m, n=args.n, shift=args.shift, rho=args.rho
    )
    variants = [Variant(v.strip()) for v in args.variants.split(",") if v.strip()]
    extra = {} if args.max_iters is None else {"max_iters": args.max_iters}
    tol = Tolerances(eps=args.eps, pivot_rule=args.pivot_rule, **extra)
    runner = BenchRunner(threads=HULLCHECK_THREADS, wall_clock=args.wall_clock)
    rows = runner.run(generate(spec, args.seed), variants, tol)
    _emit(render_table(rows, wall_clock=args.wall_clock), args.out)
    if args.trace_dir is not None:
        write_traces(args.trace_dir, rows)

    status = EXIT_POSITIVE
    for halvings in _ints(args.check_halvings):
        violations = halving_violations(rows, halvings)
        logging.info("7L check for L=%d: %d violations", halvings, violations)
        if violations:
            status = EXIT_NEGATIVE
    return status


def cmd_probe(args: argparse.Namespace) -> int:
    """Write sampled visibility diagnostics as JSON."""
    points, query = ingest_points(args.points, args.query)
    report = visibility_probe(points, query, args.eps, args.samples, args.seed)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return EXIT_POSITIVE


def cmd_verify(args: argparse.Namespace) -> int:
    """Re-check a report; exit 1 and list problems when it fails."""
    report = json.loads(args.report.read_text(encoding="utf-8"))
    points = query = lp = None
    if args.points is not None and args.query is not None:
        points, query = ingest_points(args.points, args.query)
    if args.lp_a is not None and args.lp_b is not None:
        lp = ingest_lp(args.lp_a, args.lp_b)
    problems = verify_report(
        report, points=points, query=query, lp=lp, big_m=args.big_m, mu_cap=args.mu_cap
    )
    for problem in problems:
        sys.stdout.write(f"FAIL: {problem}\n")
    if problems:
        return EXIT_NEGATIVE
    sys.stdout.write(f"OK: {report['certificate']['kind']} certificate verified\n")
    return EXIT_POSITIVE


def cmd_table(args: argparse.Namespace) -> int:
    """Print the halving iteration table as CSV."""
    halvings = _ints(args.halvings)
    lines = [",".join(["nu", "c", *(f"L={h}" for h in halvings)])]
    for row in halving_table(_floats(args.nu), halvings):
        lines.append(",".join([format_row(row[:2]), *(str(k) for k in row[2:])]))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_POSITIVE


def cmd_generate(args: argparse.Namespace) -> int:
    """Write one generated instance as ``points.csv`` and ``query.csv``."""
    spec = GeneratorSpec(
        family=args.family,
        count=args.index + 1,
        m=args.m,
        n=args.n,
        shift=args.shift,
        rho=args.rho,
    )
    instance = generate(spec, args.seed)[args.index]
    points_path, query_path = write_instance(args.out_dir, instance.points, instance.query)
    logging.info("Wrote %s and %s", points_path, query_path)
    return EXIT_POSITIVE


_COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "probe": cmd_probe,
    "verify": cmd_verify,
    "table": cmd_table,
    "generate": cmd_generate,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code.

    Args:
        argv: Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns:
        0 approximate solution / feasible, 1 witness / infeasible,
        2 inconclusive, 3 input error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except HullcheckError as exc:
        logging.error("%s", exc)
        return EXIT_INPUT_ERROR

    logging.basicConfig(
        level=str(args.log_level).upper(),
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (HullcheckError, OSError, ValueError, KeyError) as exc:
        logging.error("%s: %s", args.command, exc)
        return EXIT_INPUT_ERROR
