"""Command-line front end: ``torusgaps run`` and ``torusgaps verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ParseError, PerfectPower, TorusGapsError
from .experiment import DEFAULT_GRID, FORMATS, RunConfig, compare_published, parse_n_list, render_table, run
from .numerics import PrecisionConfig
from .published import TABLES
from .sites import VectorSpec, generate_sites
from .verify import cross_validate, raster_for_partition, three_gap_sweep
from .voronoi import build_partition

log = logging.getLogger("torusgaps")


def _vector(text: str) -> VectorSpec:
    try:
        return VectorSpec.parse(text)
    except (ParseError, PerfectPower, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _n_list(text: str) -> list[int]:
    try:
        return parse_n_list(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _formats(text: str) -> frozenset[str]:
    items = frozenset(x.strip().lower() for x in text.split(",") if x.strip())
    unknown = items - FORMATS
    if unknown or not items:
        raise argparse.ArgumentTypeError(f"formats must be drawn from {sorted(FORMATS)}")
    return items


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusgaps",
        description="Voronoi cell areas and shapes for Kronecker point sets on the unit torus.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vector", type=_vector, help='constant pair, e.g. "sqrt(2),sqrt(3)" or "e,pi"')
    common.add_argument("--n", type=_n_list, help="n values: list and/or ranges, e.g. 20-150:10,200,500")
    common.add_argument("--digits", type=_positive, default=80, help="certified decimal digits (default 80)")
    common.add_argument("--guard-digits", type=int, default=40, help="extra working digits (default 40)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=_positive, default=1, help="worker processes per partition")

    p_run = sub.add_parser("run", parents=[common], help="compute S(n) and M_k(n) over a sweep of n")
    p_run.add_argument("--format", type=_formats, default=frozenset({"table"}), help="table,csv,json,svg")
    p_run.add_argument("--published-table", type=int, choices=sorted(TABLES), help="reproduce a published table")
    p_run.add_argument("--tolerance-exponent", type=int, default=None, help="area equality tolerance 10^-E")
    p_run.add_argument("--no-certify", action="store_true", help="skip the doubled-precision rerun")

    p_ver = sub.add_parser("verify", parents=[common], help="run the independent oracles")
    p_ver.add_argument("--grid", type=_positive, default=2000, help="raster resolution m (m x m pixels)")
    p_ver.add_argument("--three-gap-max", type=int, default=10_000, help="check 1D gaps for all n up to this")
    return parser


def _precision(args, parser) -> PrecisionConfig:
    try:
        return PrecisionConfig(target_digits=args.digits, guard_digits=args.guard_digits)
    except ValueError as exc:
        parser.error(str(exc))
        raise


def cmd_run(args, parser) -> int:
    table = TABLES.get(args.published_table) if args.published_table else None
    vector = args.vector or (VectorSpec.parse(table.vector) if table else None)
    if vector is None:
        parser.error("run needs --vector or --published-table")
    n_values = args.n or (list(table.columns) if table else list(DEFAULT_GRID))
    try:
        config = RunConfig(
            vector=vector,
            n_values=tuple(n_values),
            precision=_precision(args, parser),
            outputs=args.format,
            out_dir=args.out,
            threads=args.threads,
            tolerance_exponent=args.tolerance_exponent,
            certify=not args.no_certify,
            k_rows=tuple(table.m_rows) if table else None,
        )
    except ValueError as exc:
        parser.error(str(exc))
    result = run(config)
    if "table" in config.outputs:
        sys.stdout.write(render_table(result.reports, config.k_rows))
    if table:
        notes = compare_published(result.reports, table)
        label = f"Table {table.number}"
        if notes:
            print(f"differences from published {label}:")
            for note in notes:
                print(f"  {note}")
        else:
            print(f"all computed columns match published {label}")
    for n, msg in sorted(result.failures.items()):
        print(f"n={n} FAILED: {msg}", file=sys.stderr)
    uncertified = [r.n for r in result.reports if not r.certified]
    if uncertified:
        print(f"uncertified reports for n={uncertified}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_verify(args, parser) -> int:
    vector = args.vector or VectorSpec.parse("sqrt(2),sqrt(3)")
    n_values = args.n or [20, 100]
    cfg = _precision(args, parser)
    results = {"vector": str(vector), "raster": [], "three_gap": [], "failures": []}
    sites = generate_sites(vector, max(n_values), cfg)
    for n in n_values:
        try:
            s = sites.prefix(n)
            p = build_partition(s, args.threads)
            report = cross_validate(p, raster_for_partition(p, s, args.grid))
            results["raster"].append(report.to_json())
        except (TorusGapsError, ValueError) as exc:
            results["failures"].append({"n": n, "check": "raster", "error": f"{type(exc).__name__}: {exc}"})
    for const in (vector.alpha, vector.beta):
        try:
            worst = max(three_gap_sweep(const, args.three_gap_max, cfg), default=0)
            results["three_gap"].append({"alpha": str(const), "n_max": args.three_gap_max, "max_distinct": worst})
        except TorusGapsError as exc:
            results["failures"].append({"alpha": str(const), "check": "three_gap", "error": str(exc)})
    text = json.dumps(results, indent=1, sort_keys=True) + "\n"
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "verify.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 1 if results["failures"] else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args, parser)
    return cmd_verify(args, parser)


if __name__ == "__main__":
    sys.exit(main())
