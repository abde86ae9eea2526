"""Deterministic synthetic microdata generation.

Values are drawn with splitmix64 (Steele/Lea, as specified by Vigna), not the
host library's default RNG, so the same spec and seed produce byte-identical
datasets on every platform and in any language that reimplements the
generator: one 64-bit draw per cell, row-major (record by record, variable by
variable), u = draw / 2**64, then a linear scan of the cumulative weights.

The packaged spec "kw-synth-1000" is a 1000-record EHR-shaped table (zip code,
gender, year of birth, place of birth with a dominant local mass, district of
residence) used by the bundled demos and the test suite.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from importlib import resources

from .errors import SchemaError
from .microdata import DatasetSchema, Microdata, VariableMeta

_MASK64 = (1 << 64) - 1

CANONICAL_SPEC_NAME = "kw-synth-1000"


class SplitMix64:
    """splitmix64 64-bit generator; state advances by the golden gamma."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        return self.next_u64() / 2.0 ** 64


@dataclass(frozen=True)
class VariablePool:
    """Weighted value pool for one generated variable."""

    name: str
    kind: str
    values: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError(f"variable {self.name!r} has an empty value pool")
        if len(self.weights) != len(self.values):
            raise ValueError(f"variable {self.name!r}: {len(self.weights)} weights "
                             f"for {len(self.values)} values")
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"variable {self.name!r} has a non-positive weight")


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    seed: int
    record_count: int
    variables: tuple[VariablePool, ...]

    def __post_init__(self) -> None:
        if self.record_count < 0:
            raise ValueError("record_count must be >= 0")
        if not self.variables:
            raise ValueError("generator spec declares no variables")

    def schema(self) -> DatasetSchema:
        return DatasetSchema(tuple(
            VariableMeta(v.name, v.kind) for v in self.variables))


def load_spec(text: str) -> GeneratorSpec:
    """Parse a generator spec JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"generator spec is not valid JSON: {exc}") from None
    try:
        variables = tuple(
            VariablePool(
                name=str(v["name"]),
                kind=str(v.get("kind", "categorical")),
                values=tuple(str(x) for x in v["values"]),
                weights=tuple(float(w) for w in v.get(
                    "weights", [1.0] * len(v["values"]))),
            )
            for v in doc["variables"]
        )
        return GeneratorSpec(
            name=str(doc.get("name", "unnamed")),
            seed=int(doc["seed"]),
            record_count=int(doc["record_count"]),
            variables=variables,
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"generator spec is malformed: {exc}") from None


def generate(spec: GeneratorSpec) -> Microdata:
    """Draw the table a GeneratorSpec describes; pure in (spec, seed)."""
    rng = SplitMix64(spec.seed)
    cumulative = []
    for pool in spec.variables:
        acc, sums = 0.0, []
        for w in pool.weights:
            acc += w
            sums.append(acc)
        cumulative.append((pool.values, sums, acc))
    records = []
    for _ in range(spec.record_count):
        row = []
        for values, sums, total in cumulative:
            u = rng.next_unit() * total
            row.append(values[min(bisect_right(sums, u), len(values) - 1)])
        records.append(tuple(row))
    return Microdata(spec.schema(), tuple(records))


def packaged_text(filename: str) -> str:
    return (resources.files("sdckit") / "data" / filename).read_text("utf-8")


def canonical_spec() -> GeneratorSpec:
    """The packaged kw-synth-1000 generator spec."""
    return load_spec(packaged_text(f"{CANONICAL_SPEC_NAME}.json"))


def canonical_hierarchy_text(variable: str) -> str:
    """Packaged generalization hierarchy CSV for a kw-synth-1000 variable."""
    return packaged_text(f"{CANONICAL_SPEC_NAME}-{variable}-hierarchy.csv")
