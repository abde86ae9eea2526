"""Command-line entry point.

Subcommands: analyze (set-size quartiles and threshold counts per qid),
anonymize (recode plan plus suppress/delete finisher to reach k-anonymity),
compare (risk/loss table for published variants against the original),
generate (deterministic synthetic corpus), serve (HTTP session service).

Exit codes: 0 success, 1 usage error, 2 data/processing error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import datagen
from .anonymizer import RecodePlan, achieve_k_anonymity, load_hierarchy
from .errors import SdcError
from .microdata import (Microdata, QuasiIdentifier, load_table, parse_schema,
                        schema_to_json, table_to_csv)
from .report import anonymity_report, comparison_report, render

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for data errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_dataset(input_path: str, schema_path: str) -> Microdata:
    schema = parse_schema(_read(schema_path))
    with open(input_path, "r", encoding="utf-8", newline="") as fh:
        return load_table(fh, schema)


def _parse_qid_list(text: str) -> list[QuasiIdentifier]:
    return [QuasiIdentifier.parse(part) for part in text.split(",") if part]


def _parse_importance(text: Optional[str]) -> Optional[dict[str, float]]:
    if text is None:
        return None
    weights = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not name or not value:
            raise ValueError(f"importance entry {part!r} is not name=weight")
        weights[name] = float(value)
    return weights


def _cmd_analyze(args: argparse.Namespace) -> int:
    data = _load_dataset(args.input, args.schema)
    qids = _parse_qid_list(args.qid)
    for qid in qids:
        qid.validate(data.schema)
    sys.stdout.write(render(anonymity_report(data, qids), args.format))
    return 0


def _cmd_anonymize(args: argparse.Namespace) -> int:
    data = _load_dataset(args.input, args.schema)
    qid = QuasiIdentifier.parse(args.qid)
    qid.validate(data.schema)
    plan = RecodePlan.from_json(_read(args.plan)) if args.plan else RecodePlan(())
    hierarchies = {}
    for spec in args.hierarchy or ():
        variable, _, path = spec.partition("=")
        if not variable or not path:
            raise ValueError(f"--hierarchy entry {spec!r} is not variable=path")
        hierarchies[variable] = load_hierarchy(_read(path), variable, data)
    result = achieve_k_anonymity(
        data, qid, args.k, plan, args.finisher,
        hierarchies=hierarchies,
        importance=_parse_importance(args.importance))

    _write(args.out, table_to_csv(result.published))
    _write(args.log, json.dumps(list(result.op_log), indent=2) + "\n")

    width = max(len(label) for label, _ in result.unsafe_trajectory)
    lines = ["unsafe records:"]
    lines += [f"  {label.ljust(width)}  {count:6d}"
              for label, count in result.unsafe_trajectory]
    lines.append(f"global risk: {result.before.global_risk:.6g} -> "
                 f"{result.after.global_risk:.6g}")
    lines.append(f"max risk:    {result.before.max_risk:.6g} -> "
                 f"{result.after.max_risk:.6g}")
    suppressed = {v: c for v, c in result.loss.suppressed_cells.items() if c}
    lines.append("suppressed cells: " + (
        ", ".join(f"{v}={c}" for v, c in suppressed.items()) or "none"))
    lines.append(f"deleted records: {result.loss.deleted_records}")
    lines.append(f"wrote published dataset to {args.out}")
    lines.append(f"wrote operation log to {args.log}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    original = _load_dataset(args.original, args.schema)
    published = []
    for spec in args.published.split(","):
        label, _, path = spec.partition("=")
        if not label or not path:
            raise ValueError(f"--published entry {spec!r} is not label=path")
        published.append((label, _load_dataset(path, args.schema)))
    eval_qids = _parse_qid_list(args.eval_qid)
    loss_qids = _parse_qid_list(args.loss_qid)
    for qid in (*eval_qids, *loss_qids):
        qid.validate(original.schema)
    report = comparison_report(original, published, eval_qids, loss_qids)
    sys.stdout.write(render(report, args.format))
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.spec == datagen.CANONICAL_SPEC_NAME:
        spec = datagen.canonical_spec()
    else:
        spec = datagen.load_spec(_read(args.spec))
    data = datagen.generate(spec)
    _write(args.out, table_to_csv(data))
    if args.schema_out:
        _write(args.schema_out, schema_to_json(data.schema))
    sys.stdout.write(f"wrote {data.record_count} records to {args.out}\n")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    # imported lazily so the CLI works without the service extras loaded
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir=args.data_dir), host=args.host,
                port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdckit",
                     description="k-anonymity analysis and anonymization "
                                 "toolkit for tabular microdata")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="set-size and threshold-count report")
    p.add_argument("--input", required=True, help="microdata CSV")
    p.add_argument("--schema", required=True, help="schema JSON")
    p.add_argument("--qid", required=True,
                   help="comma-separated qids, variables joined by '+'")
    p.add_argument("--format", default="text-table",
                   choices=("text-table", "csv", "json"))
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("anonymize", help="reach k-anonymity on a qid")
    p.add_argument("--input", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--qid", required=True, help="variables joined by '+'")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--plan", help="recode plan JSON (list of steps)")
    p.add_argument("--finisher", required=True, choices=("suppress", "delete"))
    p.add_argument("--hierarchy", action="append", metavar="VARIABLE=PATH",
                   help="hierarchy CSV for a plan variable (repeatable)")
    p.add_argument("--importance", metavar="V=W,...",
                   help="suppression importance weights, lowest blanked first")
    p.add_argument("--out", required=True, help="published CSV path")
    p.add_argument("--log", required=True, help="operation log JSON path")
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("compare", help="risk/loss comparison table")
    p.add_argument("--original", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--published", required=True, metavar="LABEL=PATH,...")
    p.add_argument("--eval-qid", required=True)
    p.add_argument("--loss-qid", required=True)
    p.add_argument("--format", default="text-table",
                   choices=("text-table", "csv", "json"))
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("generate", help="synthesize a dataset from a spec")
    p.add_argument("--spec", required=True,
                   help=f"generator spec JSON path, or the literal "
                        f"'{datagen.CANONICAL_SPEC_NAME}' for the bundled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--schema-out", help="also write the schema JSON here")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None,
                   help="directory for uploaded datasets and op logs")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SdcError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"sdckit: error: {exc}\n")
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
