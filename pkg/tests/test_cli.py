import json
import os

import numpy as np
import pytest

from garding import cli, poly_core

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = cli.main([*argv, "--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def test_classify_example(tmp_path):
    code, text = run(tmp_path, "classify", "--poly", os.path.join(DATA, "exA3.json"), "--a", "1,1,1", "--x", "1,1,-1")
    assert code == 0
    assert json.loads(text)["branches"] == ["outside", "inside"]


def test_garding_example(tmp_path):
    code, text = run(tmp_path, "check", "garding", "--poly", os.path.join(DATA, "lightcone.json"),
                     "--a", "1,0,0", "--b", "2,1,0")
    assert code == 0 and json.loads(text)["slack"] == pytest.approx(1.0)


def test_curves_csv(tmp_path):
    code, text = run(tmp_path, "curves", "--poly", "lightcone", "--b", "2,1,0", "--x", "0,0,1", "--format", "csv")
    rows = np.loadtxt(text.splitlines()[1:], delimiter=",")
    assert code == 0 and rows.shape[1] == 3
    assert np.all(np.diff(rows[:, 1]) > 0) and np.all(np.diff(rows[:, 2]) > 0)


def test_refuted_exit_code(tmp_path):
    bad = tmp_path / "circle.json"
    bad.write_text(json.dumps({"dim": 2, "degree": 2, "terms": [{"exp": [2, 0], "coeff": 1}, {"exp": [0, 2], "coeff": 1}]}))
    code, text = run(tmp_path, "check", "hyperbolic", "--poly", str(bad), "--a", "1,0")
    assert code == 1 and json.loads(text)["witness"] is not None


@pytest.mark.parametrize("argv", [
    ["eval", "--poly", "missing.json", "--x", "1,2"],
    ["eval", "--poly", "det2", "--x", "1,2"],
    ["eval", "--poly", "det2", "--x", "a,b,c"],
    ["solve", "--grid", "9", "--data", "x +* y"],
    ["frobnicate"],
])
def test_input_errors(tmp_path, argv, capsys):
    assert cli.main(argv) == 2


def test_schema_error_has_context(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2,\n "degree": }')
    assert cli.main(["eval", "--poly", str(bad), "--a", "1,0", "--x", "1,0"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_deterministic_output(tmp_path):
    argv = ["check", "hyperbolic", "--model", "det_complex", "--n", "2", "--seed", "3"]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    cli.main([*argv, "--out", str(a)])
    cli.main([*argv, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_float_format_round_trips():
    x = 0.1 + 0.2
    assert float(cli.dumps([x]).strip()[1:-1]) == x


def test_poly_json_round_trip_through_dumps():
    p = poly_core.det_expanded(3)
    q = poly_core.loads(cli.dumps(poly_core.to_json_dict(p)))
    assert q.terms == p.terms


def test_solve_writes_csv(tmp_path):
    u = tmp_path / "u.csv"
    r = tmp_path / "r.json"
    code = cli.main(["solve", "--model", "det_real", "--n", "2", "--branch", "1", "--grid", "17",
                     "--data", "x^2", "--exact", "x^2", "--out", str(u), "--report", str(r)])
    assert code == 0
    assert u.read_text().startswith("x,y,u\n")
    assert json.loads(r.read_text())["max_error"] < 1e-8
