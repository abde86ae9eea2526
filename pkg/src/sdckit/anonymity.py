"""Anonymity-set computation and k-anonymity verification.

An anonymity set (equivalence class) is the group of records sharing identical
values on a quasi-identifier. Pre-suppression analytics (partition, quartiles,
threshold counts) run on records with complete quasi-identifier tuples; records
carrying missing cells are handled by the wildcard-aware effective size, where
a missing cell is compatible with any value.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .microdata import Cell, Microdata, QuasiIdentifier, project_qid


@dataclass(frozen=True)
class FrequencyProfile:
    """Multiset of anonymity-set sizes, stored ascending."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s < 1 for s in self.sizes):
            raise ValueError("anonymity-set sizes must be >= 1")
        object.__setattr__(self, "sizes", tuple(sorted(self.sizes)))

    @property
    def class_count(self) -> int:
        return len(self.sizes)

    @property
    def covered_records(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class PartitionResult:
    profile: FrequencyProfile
    # class index per record, classes numbered by first occurrence
    labels: tuple[int, ...]


@dataclass(frozen=True)
class QuartileSummary:
    """Five-number summary of anonymity-set sizes plus the number of sets."""

    set_count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def __post_init__(self) -> None:
        if self.set_count < 1:
            raise ValueError("set_count must be >= 1")
        if not (self.min <= self.q1 <= self.median <= self.q3 <= self.max):
            raise ValueError("quartiles must be non-decreasing")


@dataclass(frozen=True)
class ThresholdCounts:
    """Records lying in anonymity sets of size <= bound, per bound."""

    entries: tuple[tuple[int, int], ...]


DEFAULT_BOUNDS = (1, 5, 10, 50)


def complete_qid_view(data: Microdata, qid: QuasiIdentifier
                      ) -> tuple[list[tuple[Cell, ...]], int]:
    """Project onto the quasi-identifier and drop tuples containing missing
    cells. Returns the surviving tuples and the excluded-record count."""
    view = project_qid(data, qid)
    complete = [t for t in view if None not in t]
    return complete, len(view) - len(complete)


def partition(view: list[tuple[Cell, ...]]) -> PartitionResult:
    """Group tuples into anonymity sets by component-wise equality.

    Tuples containing missing cells are rejected; exclude them first (see
    complete_qid_view) or use effective_size for wildcard semantics.
    """
    for i, t in enumerate(view):
        if None in t:
            raise DataError(f"tuple {i} contains a missing cell; "
                            "exclude incomplete records before partitioning")
    counts: Counter[tuple[Cell, ...]] = Counter(view)
    class_ids: dict[tuple[Cell, ...], int] = {}
    labels = []
    sizes = []
    for t in view:
        if t not in class_ids:
            class_ids[t] = len(class_ids)
            sizes.append(counts[t])
        labels.append(class_ids[t])
    return PartitionResult(FrequencyProfile(tuple(sizes)), tuple(labels))


def quartile_summary(profile: FrequencyProfile) -> QuartileSummary:
    """Five-number summary over the ascending set sizes.

    The p-quantile is taken at fractional rank h = (n-1)*p + 1 with linear
    interpolation between adjacent ranks (numpy's "linear" method).
    """
    if profile.class_count == 0:
        raise DataError("cannot summarize an empty frequency profile")
    sizes = np.asarray(profile.sizes, dtype=float)
    q = np.quantile(sizes, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return QuartileSummary(profile.class_count, *(float(v) for v in q))


def threshold_counts(profile: FrequencyProfile,
                     bounds: tuple[int, ...] = DEFAULT_BOUNDS) -> ThresholdCounts:
    """For each bound b, the number of records in anonymity sets of size <= b."""
    if list(bounds) != sorted(bounds):
        raise ValueError(f"bounds must be sorted ascending, got {list(bounds)}")
    entries = tuple(
        (b, sum(s for s in profile.sizes if s <= b))
        for b in bounds
    )
    return ThresholdCounts(entries)


def _compatible(a: tuple[Cell, ...], b: tuple[Cell, ...]) -> bool:
    return all(x == y or x is None or y is None for x, y in zip(a, b))


def effective_sizes_of_view(view: list[tuple[Cell, ...]]) -> list[int]:
    """Effective size per tuple of an already-projected view (see
    effective_sizes)."""
    complete = [None not in t for t in view]
    counts = Counter(t for t, ok in zip(view, complete) if ok)
    sizes = [counts[t] if ok else 0 for t, ok in zip(view, complete)]
    for i, t in enumerate(view):
        if complete[i]:
            continue
        n_compat = 1  # itself
        for j, u in enumerate(view):
            if j != i and _compatible(t, u):
                n_compat += 1
                if complete[j]:
                    sizes[j] += 1
        sizes[i] = n_compat
    return sizes


def effective_sizes(data: Microdata, qid: QuasiIdentifier) -> list[int]:
    """Wildcard-aware anonymity-set size for every record.

    Two records are compatible when every quasi-identifier cell pair is equal
    or at least one side is missing. The effective size of a record is the
    number of records compatible with it (itself included). On data without
    missing cells this equals the exact-match class size.

    Compatibility is not transitive, so these are per-record neighborhoods
    rather than a partition; they are the basis of every post-suppression
    k-anonymity claim.
    """
    return effective_sizes_of_view(project_qid(data, qid))


def effective_size(record_index: int, data: Microdata, qid: QuasiIdentifier) -> int:
    """Effective anonymity-set size of one record (see effective_sizes)."""
    view = project_qid(data, qid)
    t = view[record_index]
    return sum(1 for u in view if _compatible(t, u))


def is_k_anonymous(data: Microdata, qid: QuasiIdentifier, k: int) -> bool:
    """True iff every record's effective size is at least k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return all(size >= k for size in effective_sizes(data, qid))
