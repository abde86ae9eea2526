import json

import pytest
from fastapi.testclient import TestClient

from sdckit.anonymity import complete_qid_view, partition, quartile_summary
from sdckit.datagen import canonical_hierarchy_text
from sdckit.microdata import QuasiIdentifier, schema_to_json, table_to_csv
from sdckit.risk import risk_summary, threshold_for_k
from sdckit.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def session(client, corpus):
    dataset_id = upload(client, corpus)
    r = client.post("/api/sessions", json={"dataset_id": dataset_id})
    assert r.status_code == 201
    return r.json()["session_id"]


def upload(client, data):
    r = client.post("/api/datasets", files={
        "csv": ("t.csv", table_to_csv(data), "text/csv"),
        "schema": ("t.json", schema_to_json(data.schema), "application/json"),
    })
    assert r.status_code == 201
    return r.json()["dataset_id"]


def yob_hierarchy_rows():
    lines = canonical_hierarchy_text("yob").strip().splitlines()[1:]
    return [line.split(",") for line in lines]


def test_upload_rejects_bad_csv_with_detail(client, corpus):
    bad = "zc,gender,yob,pob,dor\r\nonly,two\r\n"
    r = client.post("/api/datasets", files={
        "csv": ("t.csv", bad, "text/csv"),
        "schema": ("t.json", schema_to_json(corpus.schema),
                   "application/json"),
    })
    assert r.status_code == 400
    assert "row 1" in r.json()["detail"]


def test_session_on_unknown_dataset_404(client):
    r = client.post("/api/sessions", json={"dataset_id": "missing"})
    assert r.status_code == 404


def test_summary_equals_direct_computation(client, session, corpus):
    qid = QuasiIdentifier.parse("zc+gender+yob")
    r = client.get(f"/api/sessions/{session}/summary",
                   params={"qid": qid.label})
    assert r.status_code == 200
    payload = r.json()
    view, excluded = complete_qid_view(corpus, qid)
    profile = partition(view).profile
    qs = quartile_summary(profile)
    assert payload["classes"] == profile.class_count
    assert payload["excluded"] == excluded
    assert (payload["min"], payload["q1"], payload["median"], payload["q3"],
            payload["max"]) == (qs.min, qs.q1, qs.median, qs.q3, qs.max)
    assert payload["record_count"] == corpus.record_count


def test_risk_equals_direct_computation(client, session, corpus):
    qid = QuasiIdentifier.parse("zc+gender+yob")
    r = client.get(f"/api/sessions/{session}/risk",
                   params={"qid": qid.label, "k": 5})
    payload = r.json()
    summary = risk_summary(corpus, qid, threshold_for_k(5))
    assert payload["global_risk"] == summary.global_risk
    assert payload["max_risk"] == summary.max_risk
    assert payload["unsafe_count"] == summary.unsafe_count
    assert payload["threshold"] == 0.2
    assert sum(payload["histogram"]["counts"]) == corpus.record_count


def test_bad_qid_400(client, session):
    r = client.get(f"/api/sessions/{session}/summary",
                   params={"qid": "zc+height"})
    assert r.status_code == 400
    r = client.get(f"/api/sessions/{session}/summary")
    assert r.status_code == 400


def test_unknown_session_404(client):
    assert client.get("/api/sessions/nope/summary",
                      params={"qid": "zc"}).status_code == 404
    assert client.post("/api/sessions/nope/undo").status_code == 404
    assert client.get("/api/sessions/nope/export").status_code == 404


def test_level_zero_recode_is_identity(client, session):
    qid = "zc+gender+yob"
    before = client.get(f"/api/sessions/{session}/risk",
                        params={"qid": qid, "k": 2}).json()
    r = client.post(f"/api/sessions/{session}/ops", json={
        "op": "recode", "variable": "yob", "level": 0,
        "hierarchy": yob_hierarchy_rows(), "qid": qid, "k": 2})
    assert r.status_code == 200
    assert r.json()["risk"] == before
    assert r.json()["deleted_records"] == 0
    assert all(v == 0 for v in r.json()["suppressed_cells"].values())


def test_full_workflow_and_undo_byte_equality(client, session):
    qid = "zc+gender+yob"
    s0 = client.get(f"/api/sessions/{session}/summary",
                    params={"qid": qid}).json()

    ops = [
        {"op": "truncate", "variable": "zc", "digits": 1, "qid": qid, "k": 2},
        {"op": "recode", "variable": "yob", "level": 1,
         "hierarchy": yob_hierarchy_rows(), "qid": qid, "k": 2},
        {"op": "suppress", "qid": qid, "k": 2},
    ]
    unsafe = []
    for op in ops:
        r = client.post(f"/api/sessions/{session}/ops", json=op)
        assert r.status_code == 200
        unsafe.append(r.json()["risk"]["unsafe_count"])
    assert unsafe == sorted(unsafe, reverse=True)
    assert unsafe[-1] == 0
    final = client.get(f"/api/sessions/{session}/risk",
                       params={"qid": qid, "k": 2}).json()
    assert final["max_risk"] <= 0.5

    for expected_depth in (2, 1, 0):
        r = client.post(f"/api/sessions/{session}/undo")
        assert r.status_code == 200
        assert r.json()["depth"] == expected_depth

    r = client.post(f"/api/sessions/{session}/undo")
    assert r.status_code == 409

    s1 = client.get(f"/api/sessions/{session}/summary",
                    params={"qid": qid}).json()
    assert s1 == s0


def test_ops_error_codes(client, session):
    r = client.post(f"/api/sessions/{session}/ops", json={
        "op": "rotate", "qid": "zc", "k": 2})
    assert r.status_code == 400
    # malformed hierarchy: level 1 merges a/b, level 2 splits them
    r = client.post(f"/api/sessions/{session}/ops", json={
        "op": "recode", "variable": "gender", "level": 1,
        "hierarchy": [["F", "G", "X"], ["M", "G", "Y"]],
        "qid": "gender", "k": 2})
    assert r.status_code == 422
    # truncate on a non-digit variable is an operator precondition failure
    r = client.post(f"/api/sessions/{session}/ops", json={
        "op": "truncate", "variable": "pob", "digits": 1,
        "qid": "pob", "k": 2})
    assert r.status_code == 422


def test_sessions_are_isolated(client, corpus):
    dataset_id = upload(client, corpus)
    a = client.post("/api/sessions", json={"dataset_id": dataset_id}).json()["session_id"]
    b = client.post("/api/sessions", json={"dataset_id": dataset_id}).json()["session_id"]
    client.post(f"/api/sessions/{a}/ops", json={
        "op": "truncate", "variable": "zc", "digits": 1,
        "qid": "zc", "k": 2})
    summary_b = client.get(f"/api/sessions/{b}/summary",
                           params={"qid": "zc"}).json()
    assert summary_b["classes"] == 38  # untouched by session a's truncate


def test_export_matches_writer(client, session, corpus):
    r = client.get(f"/api/sessions/{session}/export")
    assert r.status_code == 200
    assert r.content.decode("utf-8") == table_to_csv(corpus)


def test_report_endpoint_shape(client, session):
    client.post(f"/api/sessions/{session}/ops", json={
        "op": "truncate", "variable": "zc", "digits": 1,
        "qid": "zc+gender+yob", "k": 2})
    r = client.get(f"/api/sessions/{session}/report",
                   params={"eval_qid": "zc+gender+yob",
                           "loss_qid": "gender+pob"})
    assert r.status_code == 200
    doc = r.json()
    assert doc["columns"] == ["metric", "original", "published"]
    labels = [row[0] for row in doc["rows"]]
    assert "global risk [zc+gender+yob]" in labels
    assert "loss ratio [gender+pob]" in labels


def test_data_dir_write_through(tmp_path, corpus):
    client = TestClient(create_app(data_dir=str(tmp_path)))
    dataset_id = upload(client, corpus)
    session = client.post("/api/sessions",
                          json={"dataset_id": dataset_id}).json()["session_id"]
    client.post(f"/api/sessions/{session}/ops", json={
        "op": "truncate", "variable": "zc", "digits": 1,
        "qid": "zc", "k": 2})
    uploaded = tmp_path / "datasets" / f"{dataset_id}.csv"
    log_file = tmp_path / "sessions" / f"{session}.oplog.json"
    assert uploaded.read_bytes().decode("utf-8") == table_to_csv(corpus)
    doc = json.loads(log_file.read_text())
    assert doc["dataset_id"] == dataset_id
    assert [e["op"] for e in doc["op_log"]] == ["truncate"]
