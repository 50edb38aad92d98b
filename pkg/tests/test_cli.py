import csv
import json

import numpy as np
import pytest

from egh_lab.cli import RunReport, main
from egh_lab.scenarios import hexagon_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_gh_pointed_and_witness(tmp_path, capsys):
    a = write(tmp_path, "a.json", {"dist": [[0, 0.1], [0.1, 0]]})
    b = write(tmp_path, "b.json", {"dist": [[0]]})
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "gh", a, b, "--witness", str(w))
    rep = RunReport.from_json(out)
    assert code == 0 and rep.results["gh"]["eps"] == pytest.approx(0.05)
    assert rep.verdicts["mode"] == "exact" and len(rep.input_digests) == 2
    assert json.loads(w.read_text())["relation"]


def test_gh_equivariant_triples(tmp_path, capsys):
    t = hexagon_graph(1).to_dict()
    a = write(tmp_path, "a.json", t)
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "gh", a, a, "--equivariant", "--out", str(out_path))
    assert code == 0 and out == ""
    rep = RunReport.from_json(out_path.read_text())
    assert rep.results["gh"]["eps"] == 0.0


def test_gh_input_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", {"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})
    code, _, err = run(capsys, "gh", bad, bad)
    assert code == 2 and "not a metric" in err
    code, _, err = run(capsys, "gh", bad, str(tmp_path / "missing.json"))
    assert code == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{")
    assert run(capsys, "gh", str(junk), str(junk))[0] == 2


@pytest.mark.parametrize("name", ["hexagon", "counterexample_III", "cyclic_tower", "torus_collapse"])
def test_check_scenarios_match(name, capsys, tmp_path):
    idx = {"hexagon": "1,2", "counterexample_III": "10", "cyclic_tower": "1-3", "torus_collapse": "2"}[name]
    table = tmp_path / "t.csv"
    code, out, _ = run(capsys, "check", name, "--indices", idx, "--csv", str(table))
    rep = json.loads(out)
    assert code == 0 and rep["verdicts"]["match"], rep["verdicts"]
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["index", "key", "value"] and len(rows) > 1


def test_check_detects_mismatch(capsys):
    # a coarse tolerance makes the counterexample pass, which contradicts its expectation
    code, out, _ = run(capsys, "check", "counterexample_II", "--indices", "10", "--delta", "100")
    assert code == 1 and json.loads(out)["verdicts"]["mismatches"]


def test_check_unknown_scenario(capsys):
    code, _, err = run(capsys, "check", "klein_bottle")
    assert code == 2 and "unknown scenario" in err


def test_borsuk_random_and_matrix(tmp_path, capsys):
    code, out, _ = run(capsys, "borsuk", "--random", "7", "--n", "3", "--k", "1", "--s", "2")
    rep = json.loads(out)
    assert code == 0 and rep["verdicts"]["within_2eps"]
    assert rep["results"]["witness"]["value_norm"] <= 1e-9
    m = write(tmp_path, "m.json", {"n": 4, "s": 1, "matrix": [[1, 0, 0, 2], [0, 1, -1, 0]]})
    code, out, _ = run(capsys, "borsuk", "--map", m)
    assert code == 0 and len(json.loads(out)["input_digests"]) == 1


def test_borsuk_dimension_gate(capsys):
    code, _, err = run(capsys, "borsuk", "--n", "2", "--k", "2")
    assert code == 2 and "n > k" in err


def test_norms_finite_and_algebra(tmp_path, capsys):
    table = tmp_path / "n.csv"
    code, out, _ = run(capsys, "norms", "hexagon", "--index", "2", "--csv", str(table))
    rep = json.loads(out)
    assert code == 0 and rep["verdicts"]["closure_ok"]
    assert rep["results"]["norms"]["e"]["zero_set"] == [[0, 1, 2, 3, 4, 5], [0, 2, 1, 3, 5, 4]]
    code, out, _ = run(capsys, "norms", "circle_arc")
    rep = json.loads(out)
    assert code == 0 and rep["verdicts"]["sandwich_ok"] is True
    code, out, _ = run(capsys, "norms", "cyclic_tower", "--index", "3", "--r-sweep", "2,0.5")
    assert code == 0 and set(json.loads(out)["results"]["norms"]) == {"r=2.0", "r=0.5"}
    assert run(capsys, "norms", "moebius")[0] == 2


def test_scenario_export(tmp_path, capsys):
    code, out, _ = run(capsys, "scenario", "export", "hexagon", "2")
    data = json.loads(out)
    assert code == 0 and data["triples"][0]["group"]["elements"]
    p = tmp_path / "x.json"
    assert run(capsys, "scenario", "export", "rotation", "1", "--out", str(p))[0] == 0
    assert json.loads(p.read_text())["maps"][0]["A_src_size"] > 0
    assert run(capsys, "scenario", "export", "nope", "1")[0] == 2


def test_threads_env_gives_same_results(monkeypatch, capsys):
    _, serial, _ = run(capsys, "check", "hexagon", "--indices", "1,2,4")
    monkeypatch.setenv("EGH_LAB_THREADS", "3")
    _, threaded, _ = run(capsys, "check", "hexagon", "--indices", "1,2,4")
    assert json.loads(serial)["results"] == json.loads(threaded)["results"]


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["check", "hexagon", "--delta", "abc"]) == 2
    assert main(["--version"]) == 0


def test_report_round_trip():
    rep = RunReport(["x"], {"f": "0"}, {"a": np.float64(1.5)}, {"ok": True})
    back = RunReport.from_json(rep.to_json())
    assert back.results == {"a": 1.5} and back.verdicts == {"ok": True}
