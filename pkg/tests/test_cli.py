import csv
import io
import json
import subprocess
import sys

import pytest

from setmaplab.cli import CSV_COLUMNS, ExperimentSpec, main, parse_mapping, run
from setmaplab.constructions import interval_mapping


def test_run_freeset():
    rep = run(ExperimentSpec("freeset", family="interval", n=12))
    assert rep.passed and rep.status == "ok"
    assert rep.cases[0]["value"] == 4


def test_run_ladder():
    rep = run(ExperimentSpec("ladder", n_max=1))
    assert [c["value"] for c in rep.cases] == [5, 7]
    assert all(c["params"]["exact"] for c in rep.cases)


def test_reruns_share_a_body():
    spec = ExperimentSpec("amalgamate", flavor="ranked", count=10, seed=3)
    assert run(spec).body() == run(spec).body()
    spec = ExperimentSpec("freeset", family="random", n=12, k=2, seed=4, workers=2)
    assert run(spec).body() == run(spec).body()


def test_report_echoes_params():
    rep = run(ExperimentSpec("ramsey", a=5, b=3, c=3, r=2))
    d = rep.to_dict()
    assert d["params"]["a"] == 5 and d["experiment"] == "ramsey"
    assert d["cases"][0]["result"] == "fails"
    assert {"passed", "status", "wall_clock"} <= set(d)


def test_parse_mapping_round_trip(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(interval_mapping(6).to_json())
    f = parse_mapping(path)
    assert f == interval_mapping(6)
    assert f.to_json() == path.read_text()


def test_parse_mapping_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4, "k": 2, "images": {"0,1": [1]}}')
    with pytest.raises(ValueError, match="0, 1"):
        parse_mapping(bad)
    flagged = tmp_path / "flag.json"
    flagged.write_text('{"n": 6, "k": 4, "flags": ["interval_bounded"], "images": {"0,1,2,3": [5]}}')
    with pytest.raises(ValueError):
        parse_mapping(flagged)


def test_exit_codes(tmp_path, capsys):
    assert main(["freeset", "--n", "8"]) == 0
    assert main(["freeset", "--n", "20", "--cap-nodes", "10"]) == 1
    assert main(["freeset", "--family", "random", "--n", "5"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    capsys.readouterr()


def test_resource_limit_status(capsys):
    main(["freeset", "--n", "20", "--cap-nodes", "10"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "resource-limit" and not doc["passed"]


def test_bad_input_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4, "k": 2, "images": {"0,1": [1]}}')
    assert main(["freeset", "--in", str(bad)]) == 2
    assert "(0, 1)" in capsys.readouterr().err


def test_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["position-lemma", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == CSV_COLUMNS
    assert rows[2][1] == "size-6" and rows[2][5] == "2 3"


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SETMAPLAB_OUTPUT_DIR", str(tmp_path))
    assert main(["diagonalize", "--m", "3", "--format", "text"]) == 0
    assert "SAT" in (tmp_path / "diagonalize.text").read_text()


def test_construct_then_freeset(tmp_path):
    out = tmp_path / "prefix.json"
    assert main(["construct", "--family", "prefix", "--n", "6", "--out", str(out)]) == 0
    mapping = tmp_path / "m.json"
    mapping.write_text(json.dumps(json.loads(out.read_text())["artifact"]))
    rep = run(ExperimentSpec("freeset", input=str(mapping)))
    assert rep.cases[0]["value"] == 2


def test_amalgamate_from_file(tmp_path):
    from setmaplab.corpus import case_rng, delta_pair_quadruple

    F, p, q = delta_pair_quadruple(case_rng(5, 5))
    doc = tmp_path / "pq.json"
    doc.write_text(json.dumps({"p": p.to_dict(), "q": q.to_dict()}))
    rep = run(ExperimentSpec("amalgamate", input=str(doc)))
    assert rep.passed and rep.artifact["flavor"] == "quadruple"


def test_force_with_kills():
    rep = run(ExperimentSpec("force", flavor="pair", family="prefix", n=7, m=5))
    assert rep.passed
    assert rep.cases[-1]["value"] == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "setmaplab", "ramsey", "--a", "6", "--b", "3",
                          "--c", "3", "--r", "2", "--format", "text"], capture_output=True, text=True)
    assert res.returncode == 0 and "holds" in res.stdout
