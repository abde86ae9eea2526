from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdckit.anonymity import (FrequencyProfile, complete_qid_view,
                              effective_size, effective_sizes,
                              is_k_anonymous, partition, quartile_summary,
                              threshold_counts)
from sdckit.datagen import SplitMix64
from sdckit.errors import DataError
from sdckit.microdata import QuasiIdentifier

from conftest import make_data, random_dataset


def pairwise_oracle_profile(view):
    """Brute-force grouping: compare every tuple against every class rep."""
    reps, sizes = [], []
    for row in view:
        for i, rep in enumerate(reps):
            if rep == row:
                sizes[i] += 1
                break
        else:
            reps.append(row)
            sizes.append(1)
    return tuple(sorted(sizes))


def neighborhood_oracle(view):
    """Per-record compatible-set sizes by full pairwise enumeration."""
    def compat(a, b):
        return all(x == y or x is None or y is None for x, y in zip(a, b))
    return [sum(1 for other in view if compat(row, other)) for row in view]


def test_partition_direct_grouping():
    result = partition([("A",), ("A",), ("B",), ("B",), ("C",)])
    assert sorted(result.profile.sizes) == [1, 2, 2]
    assert result.profile.class_count == 3
    # labels group equal tuples and are assigned by first occurrence
    assert result.labels == (0, 0, 1, 1, 2)


def test_partition_all_distinct():
    result = partition([(str(i),) for i in range(4)])
    assert result.profile.sizes == (1, 1, 1, 1)
    assert result.profile.class_count == 4


def test_partition_rejects_missing():
    with pytest.raises(DataError):
        partition([("A", None)])


def test_partition_matches_pairwise_oracle_seed42():
    rng = SplitMix64(42)
    rows = [(f"a{rng.next_u64() % 9}", f"b{rng.next_u64() % 7}")
            for _ in range(500)]
    got = partition(rows).profile
    assert tuple(sorted(got.sizes)) == pairwise_oracle_profile(rows)
    assert got.covered_records == 500


def test_quartile_interpolation_fixture():
    qs = quartile_summary(FrequencyProfile((1, 1, 2, 3, 5)))
    assert (qs.min, qs.q1, qs.median, qs.q3, qs.max) == (1, 1, 2, 3, 5)
    assert qs.set_count == 5


def test_quartile_fractional_ranks():
    # n=4: q1 at rank 1.75, median at 2.5, q3 at 3.25
    qs = quartile_summary(FrequencyProfile((1, 2, 3, 4)))
    assert (qs.q1, qs.median, qs.q3) == (1.75, 2.5, 3.25)


def test_quartile_single_class():
    qs = quartile_summary(FrequencyProfile((7,)))
    assert (qs.min, qs.q1, qs.median, qs.q3, qs.max) == (7, 7, 7, 7, 7)


def test_quartile_empty_profile_rejected():
    with pytest.raises(DataError):
        quartile_summary(FrequencyProfile(()))


def test_threshold_counts_hand_summation():
    tc = threshold_counts(FrequencyProfile((1, 1, 3, 5, 10)), (1, 5, 10, 50))
    assert tc.entries == ((1, 2), (5, 10), (10, 20), (50, 20))


def test_threshold_counts_all_large_classes():
    tc = threshold_counts(FrequencyProfile((60, 75, 100)), (1, 5, 10, 50))
    assert [c for _, c in tc.entries] == [0, 0, 0, 0]


def test_threshold_counts_empty_bounds():
    assert threshold_counts(FrequencyProfile((1,)), ()).entries == ()


def test_threshold_counts_unsorted_bounds_rejected():
    with pytest.raises(ValueError):
        threshold_counts(FrequencyProfile((1,)), (5, 1))


def test_effective_size_wildcard_fixture():
    data = make_data([("A", "1"), ("A", None), ("B", "1")])
    qid = QuasiIdentifier(("v0", "v1"))
    assert effective_sizes(data, qid) == [2, 2, 1]


def test_effective_size_equals_class_size_without_missing():
    rng = SplitMix64(7)
    rows = [(f"a{rng.next_u64() % 4}", f"b{rng.next_u64() % 3}")
            for _ in range(60)]
    data = make_data(rows)
    qid = QuasiIdentifier(("v0", "v1"))
    labels = partition(rows).labels
    class_sizes = Counter(labels)
    for i, eff in enumerate(effective_sizes(data, qid)):
        assert eff == class_sizes[labels[i]]


def test_effective_size_all_missing_row():
    data = make_data([(None, None), ("A", "1"), ("B", "2")])
    qid = QuasiIdentifier(("v0", "v1"))
    assert effective_size(0, data, qid) == 3


def test_effective_sizes_match_neighborhood_oracle():
    rng = SplitMix64(11)
    for _ in range(20):
        data = random_dataset(rng, max_records=80, max_variables=3,
                              max_alphabet=4, missing_rate=0.2)
        view = [tuple(rec[i] for i in range(len(data.schema.names)))
                for rec in data.records]
        qid = QuasiIdentifier(data.schema.names)
        assert effective_sizes(data, qid) == neighborhood_oracle(view)


def test_is_k_anonymous_examples():
    data = make_data([("A",), ("A",), ("B",)])
    qid = QuasiIdentifier(("v0",))
    assert is_k_anonymous(data, qid, 1) is True
    assert is_k_anonymous(data, qid, 2) is False
    data4 = make_data([("A",), ("A",), ("B",), ("B",)])
    assert is_k_anonymous(data4, qid, 2) is True
    with pytest.raises(ValueError):
        is_k_anonymous(data, qid, 0)


def test_complete_view_excludes_missing_rows():
    data = make_data([("A", "1"), (None, "1"), ("B", "2")])
    view, excluded = complete_qid_view(data, QuasiIdentifier(("v0", "v1")))
    assert view == [("A", "1"), ("B", "2")]
    assert excluded == 1


# ---- properties ----

tuples_lists = st.lists(
    st.tuples(st.sampled_from("abc"), st.sampled_from("xy")),
    min_size=1, max_size=40)


@given(tuples_lists, st.randoms())
def test_partition_permutation_invariance(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    before = tuple(sorted(partition(rows).profile.sizes))
    after = tuple(sorted(partition(shuffled).profile.sizes))
    assert before == after


@given(st.lists(st.integers(min_value=1, max_value=30), min_size=1,
                max_size=25),
       st.lists(st.integers(min_value=1, max_value=40), min_size=2,
                max_size=6, unique=True))
def test_threshold_count_monotone_in_bound(sizes, bounds):
    profile = FrequencyProfile(tuple(sizes))
    tc = threshold_counts(profile, tuple(sorted(bounds)))
    counts = [c for _, c in tc.entries]
    assert counts == sorted(counts)
    assert all(c <= profile.covered_records for c in counts)


cells = st.one_of(st.none(), st.sampled_from(["a", "b", "c"]))


@settings(max_examples=60)
@given(st.lists(st.tuples(cells, cells), min_size=1, max_size=25),
       st.data())
def test_wildcard_monotonicity(rows, data_strategy):
    """Blanking one more cell never shrinks any record's neighborhood."""
    data = make_data(rows)
    qid = QuasiIdentifier(("v0", "v1"))
    before = effective_sizes(data, qid)
    i = data_strategy.draw(st.integers(0, len(rows) - 1))
    j = data_strategy.draw(st.integers(0, 1))
    mutated = list(list(r) for r in data.records)
    mutated[i][j] = None
    after = effective_sizes(
        data.with_records(tuple(tuple(r) for r in mutated)), qid)
    assert all(a >= b for a, b in zip(after, before))


@given(st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from("xyz")),
                min_size=1, max_size=30),
       st.integers(min_value=1, max_value=5))
def test_k_anonymity_equals_min_class_size_without_missing(rows, k):
    data = make_data(rows)
    qid = QuasiIdentifier(("v0", "v1"))
    min_size = min(partition(rows).profile.sizes)
    assert is_k_anonymous(data, qid, k) == (min_size >= k)
