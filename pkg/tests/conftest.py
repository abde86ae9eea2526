import pytest

from sdckit.datagen import SplitMix64, canonical_spec, generate
from sdckit.microdata import DatasetSchema, Microdata, VariableMeta


@pytest.fixture(scope="session")
def corpus():
    return generate(canonical_spec())


def make_data(rows, names=None, kinds=None):
    """Build Microdata from plain tuples; None cells stay missing."""
    width = len(rows[0]) if rows else 1
    names = names or [f"v{i}" for i in range(width)]
    kinds = kinds or ["categorical"] * len(names)
    schema = DatasetSchema(tuple(
        VariableMeta(n, k) for n, k in zip(names, kinds)))
    return Microdata(schema, tuple(tuple(str(c) if c is not None else None
                                         for c in row) for row in rows))


def random_dataset(rng: SplitMix64, max_records=1000, max_variables=5,
                   max_alphabet=12, missing_rate=0.0):
    """Random small-alphabet dataset; collisions are common by construction."""
    n = 1 + rng.next_u64() % max_records
    width = 1 + rng.next_u64() % max_variables
    alphabet = 2 + rng.next_u64() % (max_alphabet - 1)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(width):
            if missing_rate and rng.next_unit() < missing_rate:
                row.append(None)
            else:
                row.append(f"a{rng.next_u64() % alphabet}")
        rows.append(tuple(row))
    return make_data(rows)
