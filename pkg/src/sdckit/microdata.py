"""Schema-typed microdata tables: ingestion, projection, and preprocessing.

Cells are opaque string tokens; a missing cell is represented by ``None``,
which is distinct from every token including the empty string. All metric
computations downstream depend only on token equality.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DataError, SchemaError

Cell = Optional[str]

VARIABLE_KINDS = ("categorical", "numerical", "string", "date")

_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class VariableMeta:
    """One schema variable: its name, kind, and the token that marks missing values."""

    name: str
    kind: str
    missing_marker: str = ""

    def __post_init__(self) -> None:
        if self.kind not in VARIABLE_KINDS:
            raise SchemaError(f"unknown kind {self.kind!r} for variable {self.name!r}")


@dataclass(frozen=True)
class DatasetSchema:
    variables: tuple[VariableMeta, ...]

    def __post_init__(self) -> None:
        if not self.variables:
            raise SchemaError("schema declares no variables")
        names = [v.name for v in self.variables]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise SchemaError(f"duplicate variable name: {sorted(dupes)[0]!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown variable {name!r}") from None

    def variable(self, name: str) -> VariableMeta:
        return self.variables[self.index_of(name)]

    def replace_kind(self, name: str, kind: str) -> "DatasetSchema":
        idx = self.index_of(name)
        variables = list(self.variables)
        old = variables[idx]
        variables[idx] = VariableMeta(old.name, kind, old.missing_marker)
        return DatasetSchema(tuple(variables))


@dataclass(frozen=True)
class Microdata:
    """Immutable record table. ``record_ids`` are stable identifiers assigned at
    load time; they survive casewise deletion so that published datasets can be
    aligned with their originals."""

    schema: DatasetSchema
    records: tuple[tuple[Cell, ...], ...]
    record_ids: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        width = len(self.schema.variables)
        for i, row in enumerate(self.records):
            if len(row) != width:
                raise DataError(f"record {i} has {len(row)} cells, expected {width}")
        if not self.record_ids:
            object.__setattr__(self, "record_ids", tuple(range(len(self.records))))
        elif len(self.record_ids) != len(self.records):
            raise DataError("record_ids length does not match record count")

    @property
    def record_count(self) -> int:
        return len(self.records)

    def column(self, name: str) -> tuple[Cell, ...]:
        idx = self.schema.index_of(name)
        return tuple(row[idx] for row in self.records)

    def with_records(self, records: Iterable[tuple[Cell, ...]],
                     record_ids: Iterable[int] | None = None) -> "Microdata":
        ids = tuple(record_ids) if record_ids is not None else self.record_ids
        return Microdata(self.schema, tuple(records), ids)


@dataclass(frozen=True)
class QuasiIdentifier:
    """Ordered combination of variable names an adversary could link on."""

    variables: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.variables:
            raise SchemaError("quasi-identifier must name at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise SchemaError("quasi-identifier repeats a variable")

    def validate(self, schema: DatasetSchema) -> None:
        for name in self.variables:
            schema.index_of(name)

    @property
    def label(self) -> str:
        return "+".join(self.variables)

    @classmethod
    def parse(cls, text: str) -> "QuasiIdentifier":
        """Parse the ``v1+v2+v3`` form used by the CLI and the HTTP API."""
        return cls(tuple(part for part in text.split("+") if part))


def parse_schema(text: str) -> DatasetSchema:
    """Parse a JSON schema document into a DatasetSchema.

    Expected shape: ``{"variables": [{"name": ..., "kind": ..., "missing": ...}]}``
    where ``missing`` is optional and defaults to the empty string.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("variables"), list):
        raise SchemaError('schema document must be an object with a "variables" list')
    variables = []
    for entry in doc["variables"]:
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise SchemaError(f'variable entries need "name" and "kind": {entry!r}')
        variables.append(VariableMeta(
            name=str(entry["name"]),
            kind=str(entry["kind"]),
            missing_marker=str(entry.get("missing", "")),
        ))
    return DatasetSchema(tuple(variables))


def schema_to_json(schema: DatasetSchema) -> str:
    doc = {"variables": [
        {"name": v.name, "kind": v.kind, "missing": v.missing_marker}
        for v in schema.variables
    ]}
    return json.dumps(doc, indent=2)


def load_table(stream: str | io.TextIOBase, schema: DatasetSchema) -> Microdata:
    """Read an RFC-4180 CSV with header row into a Microdata table.

    Header names must match the schema variables (any order); columns are
    reordered to schema order. Cells equal to a variable's missing marker are
    stored as missing. Row numbers in errors count data rows from 1.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("data file is empty (no header row)") from None
    if sorted(header) != sorted(schema.names):
        raise SchemaError(
            f"header {header!r} does not match schema variables {list(schema.names)!r}")
    order = [header.index(name) for name in schema.names]
    markers = [v.missing_marker for v in schema.variables]
    records = []
    for rownum, row in enumerate(reader, start=1):
        if len(row) != len(header):
            raise DataError(f"row {rownum} has {len(row)} cells, expected {len(header)}")
        cells = tuple(
            None if row[src] == markers[dst] else row[src]
            for dst, src in enumerate(order)
        )
        records.append(cells)
    return Microdata(schema, tuple(records))


def write_table(data: Microdata, stream: io.TextIOBase) -> None:
    """Write a Microdata table as RFC-4180 CSV (CRLF line endings, header row).

    Missing cells are written as the owning variable's missing marker. This is
    the single CSV writer shared by the CLI and the HTTP export endpoint.
    """
    writer = csv.writer(stream)
    writer.writerow(data.schema.names)
    markers = [v.missing_marker for v in data.schema.variables]
    for row in data.records:
        writer.writerow([markers[i] if cell is None else cell
                         for i, cell in enumerate(row)])


def table_to_csv(data: Microdata) -> str:
    buf = io.StringIO()
    write_table(data, buf)
    return buf.getvalue()


def project_qid(data: Microdata, qid: QuasiIdentifier) -> list[tuple[Cell, ...]]:
    """Per-record tuples restricted to the quasi-identifier's variables, in
    record order."""
    indices = [data.schema.index_of(name) for name in qid.variables]
    return [tuple(row[i] for i in indices) for row in data.records]


def truncate_date_to_year(data: Microdata, variable: str) -> Microdata:
    """Replace ISO ``YYYY-MM-DD`` values of a date variable by their 4-digit
    year; the variable's kind becomes categorical. Missing cells pass through."""
    meta = data.schema.variable(variable)
    if meta.kind != "date":
        raise SchemaError(f"variable {variable!r} has kind {meta.kind!r}, expected date")
    idx = data.schema.index_of(variable)
    records = []
    for rownum, row in enumerate(data.records, start=1):
        cell = row[idx]
        if cell is None:
            records.append(row)
            continue
        if not _ISO_DATE.match(cell):
            raise DataError(f"row {rownum}: malformed date {cell!r} (expected YYYY-MM-DD)")
        records.append(row[:idx] + (cell[:4],) + row[idx + 1:])
    schema = data.schema.replace_kind(variable, "categorical")
    return Microdata(schema, tuple(records), data.record_ids)
