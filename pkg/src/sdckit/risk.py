"""Per-record and dataset-level re-identification risk.

The risk model is the population-census one: a record in an anonymity set of
size f is re-identified with probability 1/f. For records whose
quasi-identifier cells contain missing values (e.g. after suppression), f is
the wildcard-aware effective size.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .errors import DataError
from .microdata import Microdata, QuasiIdentifier
from .anonymity import complete_qid_view, effective_sizes, partition


@dataclass(frozen=True)
class RiskProfile:
    """Re-identification probability per record, in record order."""

    per_record_risk: tuple[float, ...]

    @property
    def max_risk(self) -> float:
        return max(self.per_record_risk, default=0.0)


@dataclass(frozen=True)
class RiskSummary:
    global_risk: float
    max_risk: float
    unsafe_count: int
    threshold: float


def record_risks(data: Microdata, qid: QuasiIdentifier) -> RiskProfile:
    """Risk 1/f for every record, f being its effective anonymity-set size."""
    if data.record_count == 0:
        raise DataError("cannot compute risks for an empty dataset")
    return RiskProfile(tuple(1.0 / f for f in effective_sizes(data, qid)))


def global_risk(data: Microdata, qid: QuasiIdentifier) -> float:
    """Average per-record re-identification risk over the whole dataset.

    Summed per anonymity set this is (1/n) * sum_k f_k * (1/f_k); each set
    contributes exactly 1, so on data without missing quasi-identifier cells
    the result is class_count / record_count exactly.
    """
    if data.record_count == 0:
        raise DataError("cannot compute risk for an empty dataset")
    view, excluded = complete_qid_view(data, qid)
    if excluded == 0:
        return partition(view).profile.class_count / data.record_count
    risks = record_risks(data, qid).per_record_risk
    return math.fsum(risks) / data.record_count


def threshold_for_k(k: int) -> float:
    """Risk threshold whose enforcement yields k-anonymity: 1/k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1.0 / k


def unsafe_records(data: Microdata, qid: QuasiIdentifier, r_star: float) -> list[int]:
    """Indices of records whose risk strictly exceeds the threshold.

    With r_star = 1/k these are exactly the records with effective size < k.
    """
    if not 0.0 < r_star <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {r_star}")
    sizes = effective_sizes(data, qid)
    return [i for i, f in enumerate(sizes) if 1.0 / f > r_star]


def risk_summary(data: Microdata, qid: QuasiIdentifier, r_star: float) -> RiskSummary:
    """Global risk, maximum risk, and unsafe-record count at one threshold."""
    profile = record_risks(data, qid)
    unsafe = sum(1 for r in profile.per_record_risk if r > r_star)
    return RiskSummary(
        global_risk=global_risk(data, qid),
        max_risk=profile.max_risk,
        unsafe_count=unsafe,
        threshold=r_star,
    )


def default_bin_edges(n_bins: int = 10) -> tuple[float, ...]:
    return tuple(i / n_bins for i in range(n_bins + 1))


def risk_histogram(profile: RiskProfile,
                   bin_edges: tuple[float, ...] = default_bin_edges()) -> tuple[int, ...]:
    """Record counts per half-open risk bin (lower-exclusive, upper-inclusive).

    Edges must ascend strictly from 0.0 to 1.0 so that every risk in (0, 1]
    lands in exactly one bin and the counts sum to the record count.
    """
    edges = list(bin_edges)
    if any(b >= a for b, a in zip(edges, edges[1:])):
        raise ValueError(f"bin edges must be strictly ascending, got {edges}")
    if not edges or edges[0] != 0.0 or edges[-1] != 1.0:
        raise ValueError(f"bin edges must cover (0, 1], got {edges}")
    counts = [0] * (len(edges) - 1)
    for r in profile.per_record_risk:
        counts[bisect_left(edges, r) - 1] += 1
    return tuple(counts)
