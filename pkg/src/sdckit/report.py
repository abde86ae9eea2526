"""Report construction and rendering.

Reports are pure views over the metric modules: every cell is produced by the
same public function a caller would use directly, so a report can always be
cross-checked cell by cell. Three renderings are supported: an aligned text
table for terminals (quartile columns rounded half-to-even to integers),
csv and json at full precision. Loss ratios that are undefined (zero original
slope) appear as "n/a" in text/csv and null in json.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .anonymity import (DEFAULT_BOUNDS, complete_qid_view, partition,
                        quartile_summary, threshold_counts)
from .errors import DataError, UndefinedLossError
from .infoloss import info_loss_ratio, suppression_accounting
from .microdata import Microdata, QuasiIdentifier
from .risk import global_risk

CellValue = Union[str, int, float, None]

_NA = "n/a"


@dataclass(frozen=True)
class ReportTable:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[CellValue, ...], ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row width {len(row)} != header width "
                                 f"{len(self.columns)}")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
        }


def anonymity_report(data: Microdata,
                     qids: Sequence[QuasiIdentifier],
                     bounds: tuple[int, ...] = DEFAULT_BOUNDS) -> ReportTable:
    """One row per quasi-identifier: set-size quartiles plus threshold counts.

    Rows keep the caller's qid order. Records with any missing qid cell are
    excluded from the partition and reported in the final column.
    """
    columns = ("qid", "classes", "min", "q1", "median", "q3", "max",
               *(f"n<={b}" for b in bounds), "excluded")
    rows = []
    for qid in qids:
        view, excluded = complete_qid_view(data, qid)
        profile = partition(view).profile
        qs = quartile_summary(profile)
        tc = threshold_counts(profile, bounds)
        counts = tuple(count for _, count in tc.entries)
        rows.append((qid.label, profile.class_count,
                     qs.min, qs.q1, qs.median, qs.q3, qs.max,
                     *counts, excluded))
    return ReportTable("anonymity analysis", columns, tuple(rows))


def comparison_report(original: Microdata,
                      published: Sequence[tuple[str, Microdata]],
                      eval_qids: Sequence[QuasiIdentifier],
                      loss_qids: Sequence[QuasiIdentifier]) -> ReportTable:
    """Risk/loss comparison of published variants against the original.

    One column per dataset (original first), one row per metric: global risk
    for each eval qid, loss ratio for each loss qid (None where the original
    slope is zero), per-variable suppressed-cell counts, deleted records.
    """
    for label, dataset in published:
        if dataset.schema != original.schema:
            raise DataError(f"published dataset {label!r} does not share the "
                            "original's schema")
    datasets = [("original", original), *published]
    columns = ("metric", *(label for label, _ in datasets))

    rows: list[tuple[CellValue, ...]] = []
    for qid in eval_qids:
        risks = tuple(global_risk(d, qid) for _, d in datasets)
        rows.append((f"global risk [{qid.label}]", *risks))
    for qid in eval_qids:
        excl = tuple(complete_qid_view(d, qid)[1] for _, d in datasets)
        rows.append((f"records excluded [{qid.label}]", *excl))

    originals = {}
    for qid in loss_qids:
        view, _ = complete_qid_view(original, qid)
        originals[qid.label] = quartile_summary(partition(view).profile)
    for qid in loss_qids:
        cells: list[CellValue] = []
        for _, dataset in datasets:
            view, _ = complete_qid_view(dataset, qid)
            try:
                cells.append(info_loss_ratio(
                    originals[qid.label],
                    quartile_summary(partition(view).profile)))
            except UndefinedLossError:
                cells.append(None)
        rows.append((f"loss ratio [{qid.label}]", *cells))

    accounting = [suppression_accounting(original, d) for _, d in datasets]
    for variable in original.schema.names:
        rows.append((f"suppressed cells [{variable}]",
                     *(acc[0][variable] for acc in accounting)))
    rows.append(("deleted records", *(acc[1] for acc in accounting)))
    return ReportTable("risk and information loss comparison", columns,
                       tuple(rows))


_QUARTILE_COLUMNS = {"min", "q1", "median", "q3", "max"}


def _text_cell(value: CellValue, column: str) -> str:
    if value is None:
        return _NA
    if isinstance(value, float):
        if column in _QUARTILE_COLUMNS:
            return str(round(value))
        if value == int(value):
            return f"{value:.1f}"
        return f"{value:.4f}"
    return str(value)


def render(report: ReportTable, fmt: str = "text-table") -> str:
    """Serialize a report; fmt is one of text-table, csv, json."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_NA if v is None else v for v in row])
        return buf.getvalue()
    if fmt == "text-table":
        cells = [list(report.columns)]
        for row in report.rows:
            cells.append([_text_cell(v, report.columns[i])
                          for i, v in enumerate(row)])
        widths = [max(len(r[i]) for r in cells) for i in range(len(report.columns))]
        lines = [report.title]
        for j, row in enumerate(cells):
            lines.append("  ".join(
                c.ljust(w) if i == 0 else c.rjust(w)
                for i, (c, w) in enumerate(zip(row, widths))).rstrip())
            if j == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
