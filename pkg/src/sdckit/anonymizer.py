"""Anonymization operators and the greedy k-anonymization driver.

Operators are pure transformations: global recoding against a user-defined
generalization hierarchy, zip-digit truncation, local cell suppression, and
casewise deletion. The driver applies a recode plan step by step, tracks the
unsafe-record count after each step, and finishes with suppression or deletion
until every record's risk is at or below 1/k.

Every applied operation is appended to an op log whose entries are plain JSON
values; replaying a log against the original dataset reproduces the published
dataset exactly, which is what the service's undo and the CLI's --log rely on.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .anonymity import (
    complete_qid_view,
    effective_sizes_of_view,
    partition,
    quartile_summary,
    _compatible,
)
from .errors import AnonymizationError, HierarchyError, UndefinedLossError
from .infoloss import LossReport, info_loss_ratio, prec_loss, suppression_accounting
from .microdata import Cell, Microdata, QuasiIdentifier
from .risk import RiskSummary, risk_summary, threshold_for_k

_DIGITS = re.compile(r"^[0-9]+$")
_LEVEL_HEADER = re.compile(r"^level(\d+)$")


@dataclass(frozen=True)
class GeneralizationHierarchy:
    """Leveled coarsening of a variable's domain.

    ``rows`` hold one line per level-0 value: (value, image at level 1, ...,
    image at level H). Level 0 is the identity; height H is the number of
    non-identity levels. Coarsening is enforced: values merged at some level
    stay merged at every higher level.
    """

    variable: str
    rows: tuple[tuple[str, ...], ...]
    _maps: tuple[dict, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.rows:
            raise HierarchyError(f"hierarchy for {self.variable!r} has no rows")
        width = len(self.rows[0])
        for row in self.rows:
            if len(row) != width:
                raise HierarchyError(
                    f"hierarchy for {self.variable!r} has ragged rows")
        seen = set()
        for row in self.rows:
            if row[0] in seen:
                raise HierarchyError(
                    f"duplicate level-0 value {row[0]!r} in hierarchy for {self.variable!r}")
            seen.add(row[0])
        # coarsening: equal image at level i forces equal image at level i+1
        for i in range(width - 1):
            image_of_group: dict[str, str] = {}
            for row in self.rows:
                prev = image_of_group.setdefault(row[i], row[i + 1])
                if prev != row[i + 1]:
                    raise HierarchyError(
                        f"hierarchy for {self.variable!r} is not coarsening: "
                        f"level {i} merges values that level {i + 1} splits "
                        f"({prev!r} vs {row[i + 1]!r})")
        object.__setattr__(self, "_maps", tuple(
            {row[0]: row[level] for row in self.rows} for level in range(width)
        ))

    @property
    def height(self) -> int:
        return len(self.rows[0]) - 1

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(row[0] for row in self.rows)

    def mapping(self, level: int) -> dict[str, str]:
        if not 0 <= level <= self.height:
            raise HierarchyError(
                f"level {level} out of range for hierarchy of height {self.height}")
        return self._maps[level]


def load_hierarchy(text: str, variable: str,
                   data: Microdata | None = None) -> GeneralizationHierarchy:
    """Parse a hierarchy CSV (header ``level0,level1,...``) for one variable.

    When ``data`` is given, every observed non-missing value of the variable
    must appear in the level-0 column.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise HierarchyError(f"hierarchy document for {variable!r} is empty") from None
    for i, name in enumerate(header):
        m = _LEVEL_HEADER.match(name.strip())
        if not m or int(m.group(1)) != i:
            raise HierarchyError(
                f"hierarchy header must be level0,level1,...; got {header!r}")
    rows = tuple(tuple(row) for row in reader if row)
    hierarchy = GeneralizationHierarchy(variable, rows)
    if data is not None:
        observed = {c for c in data.column(variable) if c is not None}
        uncovered = observed - hierarchy.domain
        if uncovered:
            raise HierarchyError(
                f"hierarchy for {variable!r} does not cover observed value "
                f"{sorted(uncovered)[0]!r}")
    return hierarchy


def global_recode(data: Microdata, hierarchy: GeneralizationHierarchy,
                  level: int) -> Microdata:
    """Replace every non-missing cell of the hierarchy's variable by its image
    at the given level, uniformly across records."""
    mapping = hierarchy.mapping(level)
    idx = data.schema.index_of(hierarchy.variable)
    records = []
    for row in data.records:
        cell = row[idx]
        if cell is None:
            records.append(row)
            continue
        try:
            image = mapping[cell]
        except KeyError:
            raise HierarchyError(
                f"value {cell!r} of {hierarchy.variable!r} is outside the "
                f"hierarchy domain") from None
        records.append(row[:idx] + (image,) + row[idx + 1:])
    return data.with_records(records)


def zip_truncate(data: Microdata, variable: str, digits: int) -> Microdata:
    """Drop the last ``digits`` characters of uniform-length digit strings,
    padding with '*' so display width is stable ("59123" -> "5912*")."""
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    idx = data.schema.index_of(variable)
    lengths = {len(c) for c in data.column(variable) if c is not None}
    if len(lengths) > 1:
        raise AnonymizationError(
            f"values of {variable!r} have mixed lengths {sorted(lengths)}; "
            "truncation needs a uniform length")
    records = []
    for rownum, row in enumerate(data.records, start=1):
        cell = row[idx]
        if cell is None:
            records.append(row)
            continue
        if not _DIGITS.match(cell):
            raise AnonymizationError(
                f"row {rownum}: value {cell!r} of {variable!r} is not a digit string")
        if len(cell) <= digits:
            raise AnonymizationError(
                f"row {rownum}: value {cell!r} too short to drop {digits} digit(s)")
        records.append(row[:idx] + (cell[:-digits] + "*" * digits,) + row[idx + 1:])
    return data.with_records(records)


def _resolve_importance(qid: QuasiIdentifier,
                        importance: Mapping[str, float] | None) -> list[float]:
    if importance is None:
        return [1.0] * len(qid.variables)
    missing = [v for v in qid.variables if v not in importance]
    if missing:
        raise ValueError(f"importance weight missing for variable {missing[0]!r}")
    return [float(importance[v]) for v in qid.variables]


def local_suppress(data: Microdata, qid: QuasiIdentifier, r_star: float,
                   importance: Mapping[str, float] | None = None,
                   ) -> tuple[Microdata, tuple[tuple[int, str], ...]]:
    """Blank individual cells until no record's risk exceeds the threshold.

    Loop: take the unsafe record with the highest risk (ties: lowest index),
    blank its non-missing quasi-identifier cell with the lowest importance
    weight (ties: qid order), then refresh risks. Suppressing a cell makes it
    a wildcard, so effective sizes only ever grow.

    Returns the published dataset and the suppression log as
    (record_id, variable) pairs in application order.
    """
    if not 0.0 < r_star <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {r_star}")
    qid.validate(data.schema)
    weights = _resolve_importance(qid, importance)
    var_order = sorted(range(len(qid.variables)), key=lambda j: (weights[j], j))
    q_idx = [data.schema.index_of(v) for v in qid.variables]

    rows = [list(row) for row in data.records]
    view: list[tuple[Cell, ...]] = [tuple(row[i] for i in q_idx) for row in rows]
    sizes = effective_sizes_of_view(view)
    log: list[tuple[int, str]] = []

    while True:
        victim, smallest = -1, None
        for i, f in enumerate(sizes):
            if 1.0 / f > r_star and (smallest is None or f < smallest):
                victim, smallest = i, f
        if victim < 0:
            break
        old = view[victim]
        slot = next((j for j in var_order if old[j] is not None), None)
        if slot is None:
            raise AnonymizationError(
                f"record {data.record_ids[victim]} is still unsafe at threshold "
                f"{r_star} with every quasi-identifier cell suppressed")
        new = old[:slot] + (None,) + old[slot + 1:]
        view[victim] = new
        rows[victim][q_idx[slot]] = None
        log.append((data.record_ids[victim], qid.variables[slot]))
        # wildcarding a cell can only create compatibilities, never break them
        n_compat = 1
        for j, other in enumerate(view):
            if j == victim:
                continue
            if _compatible(new, other):
                n_compat += 1
                if not _compatible(old, other):
                    sizes[j] += 1
        sizes[victim] = n_compat

    return data.with_records(tuple(tuple(r) for r in rows)), tuple(log)


def casewise_delete(data: Microdata, qid: QuasiIdentifier, r_star: float
                    ) -> tuple[Microdata, int]:
    """Drop whole records whose risk exceeds the threshold, repeating until a
    fixed point (deleting records can create new singletons)."""
    if not 0.0 < r_star <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {r_star}")
    qid.validate(data.schema)
    q_idx = [data.schema.index_of(v) for v in qid.variables]
    records = list(data.records)
    ids = list(data.record_ids)
    deleted = 0
    while records:
        view = [tuple(row[i] for i in q_idx) for row in records]
        sizes = effective_sizes_of_view(view)
        keep = [i for i, f in enumerate(sizes) if not 1.0 / f > r_star]
        if len(keep) == len(records):
            break
        deleted += len(records) - len(keep)
        records = [records[i] for i in keep]
        ids = [ids[i] for i in keep]
    return Microdata(data.schema, tuple(records), tuple(ids)), deleted


@dataclass(frozen=True)
class PlanStep:
    """One recode-plan action: either a hierarchy level or a digit truncation."""

    variable: str
    level: Optional[int] = None
    truncate_digits: Optional[int] = None

    def __post_init__(self) -> None:
        if (self.level is None) == (self.truncate_digits is None):
            raise ValueError(
                f"plan step for {self.variable!r} must set exactly one of "
                "level / truncate_digits")


@dataclass(frozen=True)
class RecodePlan:
    steps: tuple[PlanStep, ...]

    def __post_init__(self) -> None:
        names = [s.variable for s in self.steps]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValueError(f"plan touches variable {sorted(dupes)[0]!r} twice")

    @classmethod
    def from_json(cls, text: str) -> "RecodePlan":
        doc = json.loads(text)
        if not isinstance(doc, list):
            raise ValueError("recode plan must be a JSON list of steps")
        steps = []
        for entry in doc:
            if "level" in entry:
                steps.append(PlanStep(entry["variable"], level=int(entry["level"])))
            elif "truncate_digits" in entry:
                steps.append(PlanStep(entry["variable"],
                                      truncate_digits=int(entry["truncate_digits"])))
            else:
                raise ValueError(f"plan step needs level or truncate_digits: {entry!r}")
        return cls(tuple(steps))


@dataclass(frozen=True)
class AnonymizationResult:
    published: Microdata
    op_log: tuple[dict, ...]
    before: RiskSummary
    after: RiskSummary
    loss: LossReport
    # (step label, unsafe-record count once the step has been applied),
    # starting from the untouched dataset
    unsafe_trajectory: tuple[tuple[str, int], ...]


def _unsafe_count(view: list[tuple[Cell, ...]], r_star: float) -> int:
    return sum(1 for f in effective_sizes_of_view(view) if 1.0 / f > r_star)


def apply_op(data: Microdata, entry: Mapping) -> Microdata:
    """Apply one op-log entry. Entries are self-contained JSON values; recode
    entries embed their hierarchy rows."""
    op = entry["op"]
    if op == "truncate":
        return zip_truncate(data, entry["variable"], int(entry["digits"]))
    if op == "recode":
        hierarchy = GeneralizationHierarchy(
            entry["variable"], tuple(tuple(r) for r in entry["hierarchy"]))
        return global_recode(data, hierarchy, int(entry["level"]))
    if op == "suppress":
        qid = QuasiIdentifier(tuple(entry["qid"]))
        published, _ = local_suppress(data, qid, float(entry["r_star"]),
                                      entry.get("importance"))
        return published
    if op == "delete":
        qid = QuasiIdentifier(tuple(entry["qid"]))
        survivors, _ = casewise_delete(data, qid, float(entry["r_star"]))
        return survivors
    raise ValueError(f"unknown op {op!r} in op log")


def replay(original: Microdata, op_log: Sequence[Mapping]) -> Microdata:
    """Reproduce a published dataset by re-applying a recorded op log."""
    data = original
    for entry in op_log:
        data = apply_op(data, entry)
    return data


def _summary_or_none(data: Microdata, qid: QuasiIdentifier):
    view, _ = complete_qid_view(data, qid)
    if not view:
        return None
    return quartile_summary(partition(view).profile)


def _slope_ratio_or_none(original: Microdata, published: Microdata,
                         qid: QuasiIdentifier) -> Optional[float]:
    before = _summary_or_none(original, qid)
    after = _summary_or_none(published, qid)
    if before is None or after is None:
        return None
    try:
        return info_loss_ratio(before, after)
    except UndefinedLossError:
        return None


def achieve_k_anonymity(data: Microdata, qid: QuasiIdentifier, k: int,
                        plan: RecodePlan, finisher: str,
                        hierarchies: Mapping[str, GeneralizationHierarchy] | None = None,
                        importance: Mapping[str, float] | None = None,
                        ) -> AnonymizationResult:
    """Greedy driver: recode per plan, then suppress or delete the remainder.

    Plan steps are applied in order with the unsafe-record count re-measured
    after each one; the finisher ("suppress" or "delete") then enforces the
    risk threshold 1/k. The published dataset satisfies k-anonymity and the
    returned op log replays to it deterministically.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if finisher not in ("suppress", "delete"):
        raise ValueError(f"finisher must be 'suppress' or 'delete', got {finisher!r}")
    qid.validate(data.schema)
    hierarchies = hierarchies or {}
    r_star = threshold_for_k(k)
    q_idx = [data.schema.index_of(v) for v in qid.variables]

    def unsafe_now(d: Microdata) -> int:
        return _unsafe_count([tuple(row[i] for i in q_idx) for row in d.records], r_star)

    current = data
    op_log: list[dict] = []
    trajectory: list[tuple[str, int]] = [("initial", unsafe_now(current))]

    for step in plan.steps:
        if step.truncate_digits is not None:
            current = zip_truncate(current, step.variable, step.truncate_digits)
            op_log.append({"op": "truncate", "variable": step.variable,
                           "digits": step.truncate_digits})
            label = f"truncate {step.variable} by {step.truncate_digits}"
        else:
            hierarchy = hierarchies.get(step.variable)
            if hierarchy is None:
                raise HierarchyError(
                    f"plan recodes {step.variable!r} but no hierarchy was provided")
            current = global_recode(current, hierarchy, step.level)
            op_log.append({"op": "recode", "variable": step.variable,
                           "level": step.level,
                           "hierarchy": [list(r) for r in hierarchy.rows]})
            label = f"recode {step.variable} to level {step.level}"
        trajectory.append((label, unsafe_now(current)))

    if finisher == "suppress":
        current, cells = local_suppress(current, qid, r_star, importance)
        op_log.append({
            "op": "suppress", "qid": list(qid.variables), "r_star": r_star,
            "importance": dict(importance) if importance is not None else None,
            "cells": [[rid, var] for rid, var in cells],
        })
    else:
        current, n_deleted = casewise_delete(current, qid, r_star)
        op_log.append({
            "op": "delete", "qid": list(qid.variables), "r_star": r_star,
            "deleted": n_deleted,
        })
    trajectory.append((finisher, unsafe_now(current)))

    if trajectory[-1][1] != 0:
        raise AnonymizationError(
            f"driver failed to reach {k}-anonymity; {trajectory[-1][1]} records unsafe")

    before = risk_summary(data, qid, r_star)
    if current.record_count:
        after = risk_summary(current, qid, r_star)
    else:
        after = RiskSummary(0.0, 0.0, 0, r_star)

    suppressed, deleted = suppression_accounting(data, current)
    heights: dict[str, int] = {}
    levels: dict[str, int] = {}
    for name in qid.variables:
        step = next((s for s in plan.steps if s.variable == name), None)
        if step is not None and step.truncate_digits is not None:
            observed = [c for c in data.column(name) if c is not None]
            heights[name] = max(len(observed[0]) - 1, 0) if observed else 0
            levels[name] = step.truncate_digits
        elif step is not None:
            heights[name] = hierarchies[name].height
            levels[name] = step.level
        else:
            heights[name] = hierarchies[name].height if name in hierarchies else 0
            levels[name] = 0
    loss = LossReport(
        slope_ratio={qid.label: _slope_ratio_or_none(data, current, qid)},
        prec_loss=prec_loss(heights, levels),
        suppressed_cells=suppressed,
        deleted_records=deleted,
    )
    return AnonymizationResult(
        published=current,
        op_log=tuple(op_log),
        before=before,
        after=after,
        loss=loss,
        unsafe_trajectory=tuple(trajectory),
    )
