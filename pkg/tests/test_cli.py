import json

import pytest

from sgmetric import path_semigroup
from sgmetric.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_validate_file_and_spec(capsys, tmp_path):
    p = tmp_path / "p3.json"
    p.write_text(json.dumps(path_semigroup(3).to_json()))
    code, rep = run_json(capsys, "validate", str(p))
    assert code == 0 and rep["outcome"] == "pass"
    assert rep["payload"]["archimedean"] is True and rep["payload"]["maximum"] == "3"
    assert set(rep) == {"command", "parameters", "outcome", "payload", "seed"}
    assert run(capsys, "validate", "path:3")[0] == 0


def test_validate_violation(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"elements": ["a", "b"], "op": [[1, 1], [0, 1]],
                             "leq": [[True, True], [False, True]]}))
    code, rep = run_json(capsys, "validate", str(p))
    assert code == 1 and rep["outcome"] == "fail"
    assert rep["payload"]["validation"]["violations"][0]["axiom"] == "commutativity"


@pytest.mark.parametrize("content", ['{"elements": ["a"', '[1, 2]', '{"elements": ["a"], "op": [[0, 0]], "leq": [[true]]}'])
def test_validate_input_errors(capsys, tmp_path, content):
    p = tmp_path / "x.json"
    p.write_text(content)
    code, out, err = run(capsys, "validate", str(p))
    assert code == 2 and err.startswith("error:")


def test_missing_file(capsys):
    assert run(capsys, "validate", "/no/such/file.json")[0] == 2
    assert run(capsys, "bound", "cube:3")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "bound", "path:3", "--seed", "-4")[0] == 2
    assert run(capsys, "check", "path:3", "--fragment-params", "colour=red")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_bound(capsys):
    code, rep = run_json(capsys, "bound", "path:4")
    assert code == 0 and rep["payload"]["bound"] == 4
    assert run_json(capsys, "bound", "product:3,2")[1]["payload"]["bound"] == 3
    code, rep = run_json(capsys, "bound", "path:4", "--max-len", "2")
    assert code == 0 and rep["payload"]["bound"] is None and rep["payload"]["exceeds_max_len"]
    assert "exceeds" in run(capsys, "bound", "path:4", "--max-len", "2")[1]


def test_check_and_determinism(capsys, tmp_path):
    args = ["check", "path:3", "--suite", "sir", "--trials", "100", "--seed", "7",
            "--fragment-params", "count=4,size=8"]
    code, out1, _ = run(capsys, *args, "--json", "-o", str(tmp_path / "a.json"))
    assert code == 0
    code, out2, _ = run(capsys, *args, "--json", "-o", str(tmp_path / "b.json"))
    assert out1 == out2
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    rep = json.loads(out1)
    assert rep["seed"] == 7 and rep["payload"]["passed"]


def test_check_derived_and_corrupted(capsys):
    assert run(capsys, "check", "product:3,2", "--suite", "derived", "--trials", "100",
               "--fragment-params", "count=4,size=8")[0] == 0
    code, rep = run_json(capsys, "check", "path:3", "--trials", "100", "--relation", "corrupted",
                         "--fragment-params", "count=4,size=8")
    assert code == 1 and rep["outcome"] == "fail"


def test_support(capsys, tmp_path):
    code, rep = run_json(capsys, "support", "product:3,2", "--k", "1")
    assert code == 1 and rep["payload"]["witness"]["C"] == ["c1", "c2"]
    space = rep["payload"]["witness"]["space"]
    assert run(capsys, "support", "path:3", "--k", "1")[0] == 0
    p = tmp_path / "space.json"
    p.write_text(json.dumps(space))
    code, rep = run_json(capsys, "support", "product:3,2", "--space", str(p), "--a", "a", "--b", "b",
                         "--C", "c1,c2", "--k", "2")
    assert code == 0 and rep["payload"]["supports"] == [["c1", "c2"]]
    code, _ = run_json(capsys, "support", "product:3,2", "--space", str(p), "--a", "a", "--b", "b",
                       "--C", "c1,c2", "--k", "1")
    assert code == 1
    assert run(capsys, "support", "product:3,2", "--space", str(p), "--a", "a", "--b", "b", "--C", "c1")[0] == 2


def test_amalgamation(capsys, tmp_path):
    code, rep = run_json(capsys, "amalgamation", "path:3", "--base", "3")
    assert code == 0 and rep["payload"]["passed"]
    fam = tmp_path / "f.json"
    fam.write_text(json.dumps({"name": "cherlin_odd_perimeter", "K1": 2, "delta": 3}))
    code, rep = run_json(capsys, "amalgamation", "path:3", "--base", "2", "--family", str(fam))
    assert code in (0, 1) and rep["payload"]["family"]["K1"] == 2
    assert run(capsys, "amalgamation", "path:3", "--base", "9")[0] == 2


def test_amalgamation_failure_is_exit_1(capsys, tmp_path):
    from sgmetric import enumerate_pocs
    from sgmetric.fraisse import check_amalgamation

    M = next(M for M in enumerate_pocs(3) if not check_amalgamation(M, 3).passed)
    p = tmp_path / "m.json"
    p.write_text(json.dumps(M.to_json()))
    code, rep = run_json(capsys, "amalgamation", str(p), "--base", "3")
    assert code == 1 and rep["payload"]["witness"]["reason"]


def test_generic(capsys, tmp_path):
    code, rep = run_json(capsys, "generic", "path:3", "--max-vertices", "8", "--seed", "3")
    assert code == 0 and rep["payload"]["vertices"] <= 8
    fam = tmp_path / "f.json"
    fam.write_text(json.dumps({"name": "cherlin_odd_perimeter", "K1": 2, "delta": 3}))
    code, rep = run_json(capsys, "generic", "path:3", "--family", str(fam), "--seed", "3")
    assert code == 0 and rep["payload"]["forbidden_triangles"] == []
    code, rep = run_json(capsys, "generic", "product:3,2", "--family", str(fam))
    assert code == 2


def test_enumerate(capsys):
    code, rep = run_json(capsys, "enumerate", "--max-size", "2")
    assert code == 0 and rep["payload"]["count"] == 3
    assert run_json(capsys, "enumerate", "--max-size", "2")[1] == rep
    assert run(capsys, "enumerate", "--max-size", "5")[0] == 2


def test_classify(capsys):
    code, out1, _ = run(capsys, "classify", "--max-size", "2", "--json")
    code2, out2, _ = run(capsys, "classify", "--max-size", "2", "--json", "--jobs", "2")
    assert code == code2 == 0 and out1 == out2
    assert "semigroups" in run(capsys, "classify", "--max-size", "2")[1]


def test_timing_flag(capsys):
    code, rep = run_json(capsys, "bound", "path:3", "--timing")
    assert "elapsed_ms" in rep
    code, rep = run_json(capsys, "bound", "path:3")
    assert "elapsed_ms" not in rep


def test_text_output_for_every_command(capsys):
    for argv in (["validate", "path:2"], ["bound", "path:2"], ["support", "path:2"],
                 ["amalgamation", "path:2", "--base", "1"], ["generic", "path:2", "--max-vertices", "4"],
                 ["enumerate", "--max-size", "1"],
                 ["check", "path:2", "--trials", "5", "--fragment-params", "count=1,size=4"]):
        code, out, err = run(capsys, *argv)
        assert code == 0 and out.strip() and not out.lstrip().startswith("{")
