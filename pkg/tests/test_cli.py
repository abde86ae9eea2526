import json

import pytest

from sdckit.anonymizer import replay
from sdckit.cli import main
from sdckit.datagen import canonical_hierarchy_text
from sdckit.microdata import load_table, parse_schema, table_to_csv


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    assert main(["generate", "--spec", "kw-synth-1000",
                 "--out", str(base / "corpus.csv"),
                 "--schema-out", str(base / "schema.json")]) == 0
    (base / "yob.csv").write_text(canonical_hierarchy_text("yob"),
                                  encoding="utf-8")
    (base / "plan.json").write_text(json.dumps([
        {"variable": "zc", "truncate_digits": 1},
        {"variable": "yob", "level": 1},
    ]), encoding="utf-8")
    return base


def test_generate_writes_loadable_corpus(workdir):
    schema = parse_schema((workdir / "schema.json").read_text())
    data = load_table((workdir / "corpus.csv").read_text(), schema)
    assert data.record_count == 1000


def test_generate_from_spec_file(workdir, capsys):
    spec = {"name": "mini", "seed": 7, "record_count": 3,
            "variables": [{"name": "a", "values": ["x", "y"]}]}
    path = workdir / "mini.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    out = workdir / "mini.csv"
    assert main(["generate", "--spec", str(path), "--out", str(out)]) == 0
    assert "3 records" in capsys.readouterr().out


def test_analyze_text_output(workdir, capsys):
    rc = main(["analyze", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc,gender+dor"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "anonymity analysis"
    assert any(line.startswith("gender+dor") for line in out.splitlines())


def test_analyze_json_output(workdir, capsys):
    rc = main(["analyze", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rows"][0][0] == "zc"


def test_usage_error_exits_1(workdir):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--input", str(workdir / "corpus.csv")])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["anonymize", "--input", "x", "--schema", "y", "--qid", "zc",
              "--k", "2", "--finisher", "evaporate", "--out", "o",
              "--log", "l"])
    assert exc.value.code == 1


def test_data_error_exits_2(workdir, capsys):
    assert main(["analyze", "--input", str(workdir / "nope.csv"),
                 "--schema", str(workdir / "schema.json"),
                 "--qid", "zc"]) == 2
    assert main(["analyze", "--input", str(workdir / "corpus.csv"),
                 "--schema", str(workdir / "schema.json"),
                 "--qid", "zc+height"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_anonymize_suppress_and_replay(workdir, capsys):
    out = workdir / "pub.csv"
    log = workdir / "oplog.json"
    rc = main(["anonymize", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc+gender+yob", "--k", "2",
               "--plan", str(workdir / "plan.json"),
               "--finisher", "suppress",
               "--hierarchy", f"yob={workdir / 'yob.csv'}",
               "--out", str(out), "--log", str(log)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "unsafe records:" in stdout
    assert "max risk:    1 -> 0.5" in stdout

    schema = parse_schema((workdir / "schema.json").read_text())
    original = load_table((workdir / "corpus.csv").read_text(), schema)
    published = load_table(out.read_bytes().decode("utf-8"), schema)
    assert published.record_count == original.record_count
    entries = json.loads(log.read_text())
    assert [e["op"] for e in entries] == ["truncate", "recode", "suppress"]
    assert table_to_csv(replay(original, entries)) == out.read_bytes().decode("utf-8")


def test_anonymize_requires_hierarchy_for_recode_step(workdir):
    rc = main(["anonymize", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc+gender+yob", "--k", "2",
               "--plan", str(workdir / "plan.json"),
               "--finisher", "suppress",
               "--out", str(workdir / "x.csv"),
               "--log", str(workdir / "x.json")])
    assert rc == 2


def test_anonymize_importance_flag(workdir):
    rc = main(["anonymize", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc+gender+yob", "--k", "2",
               "--plan", str(workdir / "plan.json"),
               "--finisher", "suppress",
               "--hierarchy", f"yob={workdir / 'yob.csv'}",
               "--importance", "zc=1,gender=10,yob=5",
               "--out", str(workdir / "pub-imp.csv"),
               "--log", str(workdir / "oplog-imp.json")])
    assert rc == 0
    entries = json.loads((workdir / "oplog-imp.json").read_text())
    suppress = entries[-1]
    assert suppress["importance"] == {"zc": 1.0, "gender": 10.0, "yob": 5.0}
    assert all(var == "zc" for _, var in suppress["cells"])


def test_compare_outputs_full_table(workdir, capsys):
    rc = main(["anonymize", "--input", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--qid", "zc+gender+yob", "--k", "2",
               "--plan", str(workdir / "plan.json"),
               "--finisher", "delete",
               "--hierarchy", f"yob={workdir / 'yob.csv'}",
               "--out", str(workdir / "pub-del.csv"),
               "--log", str(workdir / "oplog-del.json")])
    assert rc == 0
    capsys.readouterr()
    rc = main(["compare", "--original", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--published",
               f"suppress={workdir / 'pub.csv'},delete={workdir / 'pub-del.csv'}",
               "--eval-qid", "zc+gender+yob",
               "--loss-qid", "gender+pob,gender+dor",
               "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["columns"] == ["metric", "original", "suppress", "delete"]
    labels = [row[0] for row in doc["rows"]]
    assert "global risk [zc+gender+yob]" in labels
    assert "loss ratio [gender+pob]" in labels
    assert "deleted records" in labels


def test_compare_bad_published_spec_exits_2(workdir):
    rc = main(["compare", "--original", str(workdir / "corpus.csv"),
               "--schema", str(workdir / "schema.json"),
               "--published", "no-equals-sign",
               "--eval-qid", "zc", "--loss-qid", "zc"])
    assert rc == 2
