"""Experiment sweeps over n: run configuration, orchestration, and table/CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, TorusGapsError
from .numerics import PrecisionConfig
from .published import FULL_GRID, PublishedTable
from .sites import VectorSpec, generate_sites
from .statistics import GapReport, certified_partitions, gap_report
from .svg import render_svg
from .voronoi import build_partition

log = logging.getLogger(__name__)

FORMATS = frozenset({"table", "csv", "json", "svg"})
DEFAULT_GRID = FULL_GRID

_RANGE = re.compile(r"^(\d+)(?:(?:-|\.\.)(\d+)(?::(\d+))?)?$")


def parse_n_list(text: str) -> list[int]:
    """Parse ``"20,30,100-150:10,1000"`` into a sorted list of distinct positive ints."""
    values: set[int] = set()
    pos = 0
    for token in text.split(","):
        stripped = token.strip()
        m = _RANGE.match(stripped)
        offset = pos + (len(token) - len(token.lstrip()))
        if not m:
            raise ParseError("bad n value or range", text, offset, "INT, INT-INT or INT-INT:STEP")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        step = int(m.group(3)) if m.group(3) else 1
        if lo < 1 or hi < lo or step < 1:
            raise ParseError("empty or non-positive range", text, offset, "1 <= lo <= hi, step >= 1")
        values.update(range(lo, hi + 1, step))
        pos += len(token) + 1
    return sorted(values)


@dataclass(frozen=True)
class RunConfig:
    vector: VectorSpec
    n_values: tuple[int, ...]
    precision: PrecisionConfig = PrecisionConfig()
    outputs: frozenset[str] = frozenset({"table"})
    out_dir: Path | None = None
    threads: int = 1
    tolerance_exponent: int | None = None
    certify: bool = True
    k_rows: tuple[int, ...] | None = None
    """Side counts always shown as table rows (used to mirror a published template)."""

    def __post_init__(self) -> None:
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(n < 1 for n in self.n_values):
            raise ValueError("n values must be positive")
        object.__setattr__(self, "n_values", tuple(sorted(set(self.n_values))))
        unknown = set(self.outputs) - FORMATS
        if unknown:
            raise ValueError(f"unknown output formats {sorted(unknown)}")
        if self.out_dir is None and set(self.outputs) - {"table"}:
            raise ValueError("csv/json/svg output needs an output directory")


@dataclass
class RunResult:
    config: RunConfig
    reports: list[GapReport] = field(default_factory=list)
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def analyze(config: RunConfig, n: int, sites=None):
    """Partition and report for one n; returns ``(partition, report)``."""
    cfg = config.precision
    s = sites.prefix(n) if sites is not None else generate_sites(config.vector, n, cfg)
    if config.certify:
        base, check = certified_partitions(s, config.threads)
        report = gap_report(base, cfg, config.tolerance_exponent, check=check)
        return base, report
    p = build_partition(s, config.threads)
    return p, gap_report(p, cfg, config.tolerance_exponent)


def run(config: RunConfig) -> RunResult:
    """Run every n of the sweep, isolating per-n failures; writes requested outputs."""
    result = RunResult(config)
    # one generation at the largest n; smaller n reuse its prefix
    sites = generate_sites(config.vector, max(config.n_values), config.precision)
    out = config.out_dir
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    for n in config.n_values:
        try:
            partition, report = analyze(config, n, sites)
        except TorusGapsError as exc:
            log.error("n=%d failed: %s", n, exc)
            result.failures[n] = f"{type(exc).__name__}: {exc}"
            continue
        result.reports.append(report)
        log.info("n=%d S=%d M=%s certified=%s", n, report.S, report.M, report.certified)
        if out is not None and "json" in config.outputs:
            _write(out / f"partition_n{n}.json", json.dumps(partition.to_json(), indent=1, sort_keys=True) + "\n")
        if out is not None and "svg" in config.outputs:
            render_svg(partition, out / f"partition_n{n}.svg", report)
    if out is not None:
        if "json" in config.outputs:
            _write(out / "reports.json", reports_json(result))
        if "csv" in config.outputs:
            _write(out / "table.csv", render_csv(result.reports, config.k_rows))
        if "table" in config.outputs:
            _write(out / "table.txt", render_table(result.reports, config.k_rows))
    return result


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def reports_json(result: RunResult) -> str:
    cfg = result.config.precision
    payload = {
        "vector": str(result.config.vector),
        "precision": {
            "target_digits": cfg.target_digits,
            "guard_digits": cfg.guard_digits,
            "escalation_factor": cfg.escalation_factor,
        },
        "reports": [r.to_json() for r in result.reports],
        "failures": {str(n): msg for n, msg in sorted(result.failures.items())},
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def _rows(reports: list[GapReport], k_rows) -> list[tuple[str, list[int]]]:
    ks = set(k_rows or ())
    for r in reports:
        ks.update(k for k, m in r.M.items() if m)
    rows = [("S(n)", [r.S for r in reports])]
    rows += [(f"M_{k}(n)", [r.M.get(k, 0) for r in reports]) for k in sorted(ks)]
    return rows


def _check_shared_vector(reports: list[GapReport]) -> None:
    if len({str(r.v) for r in reports}) > 1:
        raise ValueError("reports for a table must share one vector")


def render_table(reports: list[GapReport], k_rows=None) -> str:
    """Column-aligned text table: one column per n, rows S(n) then M_k(n) by ascending k."""
    if not reports:
        return "(no reports)\n"
    _check_shared_vector(reports)
    header = ["n"] + [str(r.n) for r in reports]
    body = [[name] + [str(x) for x in vals] for name, vals in _rows(reports, k_rows)]
    widths = [max(len(row[c]) for row in [header] + body) for c in range(len(header))]
    lines = [f"v = {reports[0].v.label}"]
    for row in [header] + body:
        lines.append(" | ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if row is header:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(reports: list[GapReport], k_rows=None) -> str:
    if not reports:
        return ""
    _check_shared_vector(reports)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row"] + [r.n for r in reports])
    for name, vals in _rows(reports, k_rows):
        w.writerow([name] + vals)
    return buf.getvalue()


def parse_csv(text: str) -> dict[int, tuple[int, dict[int, int]]]:
    """Inverse of :func:`render_csv`: ``{n: (S, {k: M_k})}`` with zero counts dropped."""
    rows = list(csv.reader(io.StringIO(text)))
    ns = [int(x) for x in rows[0][1:]]
    out: dict[int, tuple[int, dict[int, int]]] = {n: (0, {}) for n in ns}
    for row in rows[1:]:
        name, vals = row[0], [int(x) for x in row[1:]]
        for n, val in zip(ns, vals):
            s, hist = out[n]
            if name == "S(n)":
                out[n] = (val, hist)
            elif val:
                hist[int(name[2:].split("(")[0])] = val
    return out


def compare_published(reports: list[GapReport], table: PublishedTable) -> list[str]:
    """Human-readable differences between reports and a published table."""
    notes = []
    for r in reports:
        if r.n not in table.columns:
            continue
        s, hist = table.column(r.n)
        if r.S != s:
            notes.append(f"n={r.n}: S={r.S}, published {s} [{r.diagnostics[0]}]")
        if r.M != hist:
            notes.append(f"n={r.n}: M={r.M}, published {hist}")
    return notes
