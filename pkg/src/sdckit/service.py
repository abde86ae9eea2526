"""HTTP session service for interactive anonymization.

The service is a thin state machine over the core modules: upload a dataset,
open a session on it, inspect set-size summaries and re-identification risk
for any quasi-identifier, apply one operator at a time (recode, truncate,
suppress, delete), undo, export. Every numeric payload field is produced by
the same public functions the CLI uses; the service adds no computation.

Undo is log truncation plus replay from the original dataset, so the undo
stack doubles as a crash-recovery artifact: with --data-dir set, uploaded
files and per-session op logs are written through to disk.

Payload field names are part of the wire contract and documented in
docs/api.md. Requests within one session are serialized by a per-session
lock; distinct sessions proceed concurrently.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .anonymity import (DEFAULT_BOUNDS, complete_qid_view, partition,
                        quartile_summary, threshold_counts)
from .anonymizer import apply_op
from .errors import SdcError
from .microdata import (Microdata, QuasiIdentifier, load_table, parse_schema,
                        table_to_csv)
from .report import comparison_report
from .risk import (default_bin_edges, record_risks, risk_histogram,
                   risk_summary, threshold_for_k)


@dataclass
class _Session:
    session_id: str
    dataset_id: str
    original: Microdata
    current: Microdata
    op_log: list[dict] = field(default_factory=list)
    active_qid: Optional[str] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class _Store:
    datasets: dict[str, Microdata] = field(default_factory=dict)
    sessions: dict[str, _Session] = field(default_factory=dict)
    registry_lock: threading.Lock = field(default_factory=threading.Lock)
    data_dir: Optional[Path] = None


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def _parse_qid(text: Optional[str], data: Microdata) -> QuasiIdentifier:
    if not text:
        raise _bad_request("missing qid")
    try:
        qid = QuasiIdentifier.parse(text)
        qid.validate(data.schema)
    except (SdcError, ValueError) as exc:
        raise _bad_request(str(exc)) from None
    return qid


def _parse_k(value) -> int:
    try:
        k = int(value)
    except (TypeError, ValueError):
        raise _bad_request(f"k must be an integer, got {value!r}") from None
    if k < 1:
        raise _bad_request("k must be >= 1")
    return k


def _summary_payload(data: Microdata, qid: QuasiIdentifier) -> dict:
    view, excluded = complete_qid_view(data, qid)
    profile = partition(view).profile
    qs = quartile_summary(profile)
    tc = threshold_counts(profile, DEFAULT_BOUNDS)
    return {
        "qid": qid.label,
        "record_count": data.record_count,
        "excluded": excluded,
        "classes": profile.class_count,
        "min": qs.min, "q1": qs.q1, "median": qs.median,
        "q3": qs.q3, "max": qs.max,
        "threshold_counts": [{"bound": b, "count": c} for b, c in tc.entries],
    }


def _risk_payload(data: Microdata, qid: QuasiIdentifier, k: int) -> dict:
    r_star = threshold_for_k(k)
    summary = risk_summary(data, qid, r_star)
    edges = default_bin_edges()
    counts = risk_histogram(record_risks(data, qid), edges)
    return {
        "qid": qid.label,
        "k": k,
        "threshold": r_star,
        "global_risk": summary.global_risk,
        "max_risk": summary.max_risk,
        "unsafe_count": summary.unsafe_count,
        "record_count": data.record_count,
        "histogram": {"edges": list(edges), "counts": list(counts)},
    }


def _op_entry_from_request(body: dict, data: Microdata) -> dict:
    """Normalize an /ops request into a self-contained op-log entry."""
    op = body.get("op")
    if op == "truncate":
        if "variable" not in body or "digits" not in body:
            raise _bad_request("truncate needs variable and digits")
        return {"op": "truncate", "variable": str(body["variable"]),
                "digits": int(body["digits"])}
    if op == "recode":
        if "variable" not in body or "level" not in body:
            raise _bad_request("recode needs variable, level and hierarchy")
        rows = body.get("hierarchy")
        if not isinstance(rows, list) or not rows:
            raise _bad_request("recode needs hierarchy rows "
                               "(list of level0..levelH value lists)")
        return {"op": "recode", "variable": str(body["variable"]),
                "level": int(body["level"]),
                "hierarchy": [[str(c) for c in row] for row in rows]}
    if op in ("suppress", "delete"):
        qid = _parse_qid(body.get("qid"), data)
        k = _parse_k(body.get("k"))
        entry = {"op": op, "qid": list(qid.variables),
                 "r_star": threshold_for_k(k)}
        if op == "suppress" and body.get("importance") is not None:
            imp = body["importance"]
            if not isinstance(imp, dict):
                raise _bad_request("importance must map variable to weight")
            entry["importance"] = {str(v): float(w) for v, w in imp.items()}
        return entry
    raise _bad_request(f"unknown op {op!r}; expected truncate, recode, "
                       "suppress or delete")


def _apply_entry(data: Microdata, entry: dict) -> Microdata:
    try:
        return apply_op(data, entry)
    except SdcError as exc:
        # operator precondition failed (bad hierarchy, non-digit zip, ...)
        raise HTTPException(status_code=422, detail=str(exc)) from None
    except ValueError as exc:
        raise _bad_request(str(exc)) from None


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="sdckit session service", docs_url=None,
                  redoc_url=None)
    # the workbench is served from its own origin, so the API must answer
    # cross-origin requests
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = _Store(data_dir=Path(data_dir) if data_dir else None)
    if store.data_dir:
        (store.data_dir / "datasets").mkdir(parents=True, exist_ok=True)
        (store.data_dir / "sessions").mkdir(parents=True, exist_ok=True)

    def _dataset(dataset_id: str) -> Microdata:
        try:
            return store.datasets[dataset_id]
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown dataset {dataset_id!r}") from None

    def _session(session_id: str) -> _Session:
        try:
            return store.sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id!r}") from None

    def _persist_log(session: _Session) -> None:
        if store.data_dir:
            path = store.data_dir / "sessions" / f"{session.session_id}.oplog.json"
            path.write_text(json.dumps({
                "dataset_id": session.dataset_id,
                "op_log": session.op_log,
            }, indent=2) + "\n", encoding="utf-8")

    @app.post("/api/datasets", status_code=201)
    def upload_dataset(csv: UploadFile = File(...),
                       schema_file: UploadFile = File(..., alias="schema")) -> dict:
        csv_text = csv.file.read().decode("utf-8")
        schema_text = schema_file.file.read().decode("utf-8")
        try:
            data = load_table(csv_text, parse_schema(schema_text))
        except SdcError as exc:
            raise _bad_request(str(exc)) from None
        dataset_id = uuid.uuid4().hex
        with store.registry_lock:
            store.datasets[dataset_id] = data
        if store.data_dir:
            base = store.data_dir / "datasets" / dataset_id
            base.with_suffix(".csv").write_text(csv_text, encoding="utf-8",
                                                newline="")
            base.with_suffix(".schema.json").write_text(schema_text,
                                                        encoding="utf-8")
        return {"dataset_id": dataset_id, "record_count": data.record_count,
                "variables": list(data.schema.names)}

    @app.post("/api/sessions", status_code=201)
    def open_session(body: dict) -> dict:
        dataset_id = body.get("dataset_id")
        if not isinstance(dataset_id, str):
            raise _bad_request("body must carry dataset_id")
        data = _dataset(dataset_id)
        session = _Session(session_id=uuid.uuid4().hex, dataset_id=dataset_id,
                           original=data, current=data)
        with store.registry_lock:
            store.sessions[session.session_id] = session
        return {"session_id": session.session_id}

    @app.get("/api/sessions/{session_id}/summary")
    def summary(session_id: str, qid: Optional[str] = None) -> dict:
        session = _session(session_id)
        with session.lock:
            parsed = _parse_qid(qid, session.current)
            session.active_qid = parsed.label
            return _summary_payload(session.current, parsed)

    @app.get("/api/sessions/{session_id}/risk")
    def risk(session_id: str, qid: Optional[str] = None, k: int = 2) -> dict:
        session = _session(session_id)
        with session.lock:
            parsed = _parse_qid(qid, session.current)
            session.active_qid = parsed.label
            return _risk_payload(session.current, parsed, _parse_k(k))

    @app.post("/api/sessions/{session_id}/ops")
    def apply_operation(session_id: str, body: dict) -> dict:
        session = _session(session_id)
        with session.lock:
            entry = _op_entry_from_request(body, session.current)
            qid_text = body.get("qid") or session.active_qid
            qid = _parse_qid(qid_text, session.current)
            k = _parse_k(body.get("k", 2))
            before = session.current
            after = _apply_entry(before, entry)
            session.current = after
            session.op_log.append(entry)
            session.active_qid = qid.label
            _persist_log(session)
            suppressed = _suppression_delta(before, after)
            return {
                "op": entry,
                "depth": len(session.op_log),
                "risk": _risk_payload(after, qid, k),
                "suppressed_cells": suppressed,
                "deleted_records": before.record_count - after.record_count,
            }

    @app.post("/api/sessions/{session_id}/undo")
    def undo(session_id: str) -> dict:
        session = _session(session_id)
        with session.lock:
            if not session.op_log:
                raise HTTPException(status_code=409,
                                    detail="nothing to undo: empty op log")
            session.op_log.pop()
            current = session.original
            for entry in session.op_log:
                current = apply_op(current, entry)
            session.current = current
            _persist_log(session)
            return {"depth": len(session.op_log)}

    @app.get("/api/sessions/{session_id}/export")
    def export(session_id: str) -> Response:
        session = _session(session_id)
        with session.lock:
            text = table_to_csv(session.current)
        return Response(content=text, media_type="text/csv",
                        headers={"Content-Disposition":
                                 'attachment; filename="published.csv"'})

    @app.get("/api/sessions/{session_id}/report")
    def report(session_id: str, eval_qid: Optional[str] = None,
               loss_qid: Optional[str] = None) -> JSONResponse:
        session = _session(session_id)
        with session.lock:
            eval_text = eval_qid or session.active_qid
            if not eval_text:
                raise _bad_request("missing eval_qid and no active qid")
            eval_qids = [_parse_qid(part, session.original)
                         for part in eval_text.split(",") if part]
            loss_qids = [_parse_qid(part, session.original)
                         for part in (loss_qid or "").split(",") if part]
            table = comparison_report(session.original,
                                      [("published", session.current)],
                                      eval_qids, loss_qids)
        return JSONResponse(table.to_dict())

    return app


def _suppression_delta(before: Microdata, after: Microdata) -> dict[str, int]:
    """Cells blanked by this step, per variable, matched by record id."""
    surviving = {rid: rec for rid, rec in zip(before.record_ids, before.records)}
    counts = {name: 0 for name in after.schema.names}
    for rid, rec in zip(after.record_ids, after.records):
        prior = surviving[rid]
        for j, name in enumerate(after.schema.names):
            if rec[j] is None and prior[j] is not None:
                counts[name] += 1
    return counts
