"""Information-loss metrics for published datasets.

The primary metric is the ratio between the published and original slope of
anonymity-set sizes across the third-to-fourth quartile: values above 1 mean
the anonymization flattened the tail distribution, i.e. lost information.
A hierarchy-height metric (Prec) and plain suppression/deletion accounting
complement it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .anonymity import QuartileSummary
from .errors import SchemaError, UndefinedLossError
from .microdata import Microdata


@dataclass(frozen=True)
class LossReport:
    """Per-qid slope ratios (None where undefined), hierarchy-height loss,
    and suppression/deletion accounting for one published dataset."""

    slope_ratio: Mapping[str, Optional[float]] = field(default_factory=dict)
    prec_loss: float = 0.0
    suppressed_cells: Mapping[str, int] = field(default_factory=dict)
    deleted_records: int = 0


def quartile_slope(summary: QuartileSummary) -> float:
    """Slope of the set-size distribution between the third and fourth
    quartile: (max - q3) / set_count."""
    return (summary.max - summary.q3) / summary.set_count


def info_loss_ratio(original: QuartileSummary, published: QuartileSummary) -> float:
    """Published-to-original quartile-slope ratio; higher means more loss.

    Raises UndefinedLossError when the original slope is zero (max == q3),
    in which case reports print "n/a" instead of a number.
    """
    denominator = quartile_slope(original)
    if denominator == 0:
        raise UndefinedLossError(
            "original quartile slope is zero (max == q3); loss ratio undefined")
    return quartile_slope(published) / denominator


def prec_loss(heights: Mapping[str, int], applied_levels: Mapping[str, int]) -> float:
    """Mean applied-level / hierarchy-height ratio across variables.

    0 means nothing was generalized, 1 means every variable sits at the top of
    its hierarchy. Unweighted by cell counts; variables of height 0 cannot be
    generalized and contribute 0.
    """
    if not heights:
        raise ValueError("prec_loss needs at least one variable")
    ratios = []
    for name, height in heights.items():
        level = applied_levels.get(name, 0)
        if level > height:
            raise ValueError(
                f"applied level {level} exceeds hierarchy height {height} for {name!r}")
        ratios.append(level / height if height > 0 else 0.0)
    return sum(ratios) / len(ratios)


def suppression_accounting(original: Microdata, published: Microdata
                           ) -> tuple[dict[str, int], int]:
    """Count per-variable cells that became missing, plus deleted records.

    Surviving records are aligned by their stable record id, so the counts
    stay correct after casewise deletion breaks positional alignment.
    """
    if original.schema.names != published.schema.names:
        raise SchemaError("published schema does not match the original")
    by_id = {rid: row for rid, row in zip(original.record_ids, original.records)}
    unknown = [rid for rid in published.record_ids if rid not in by_id]
    if unknown:
        raise SchemaError(f"published record id {unknown[0]} not present in original")
    counts = {name: 0 for name in original.schema.names}
    for rid, row in zip(published.record_ids, published.records):
        before = by_id[rid]
        for name, old, new in zip(original.schema.names, before, row):
            if new is None and old is not None:
                counts[name] += 1
    deleted = original.record_count - published.record_count
    return counts, deleted
