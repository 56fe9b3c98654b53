import csv
import io
import json
import subprocess
import sys

import pytest

from mcopt import cli


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    maj = tmp_path / "maj3.json"
    assert run(capsys, "gen-majority", "--m", 3, "--out", maj)[0] == 0
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"kind": "junta", "coords": [], "table": [0.5]}))
    aud = tmp_path / "aud.json"
    aud.write_text(json.dumps([{"kind": "majority", "coords": [0, 1, 2]},
                               {"kind": "junta_auditor", "coords": [1], "table": [-1, 1]}]))
    return {"dist": maj, "f": f, "aud": aud, "dir": tmp_path}


def test_maj_cor_example(capsys):
    code, out, _ = run(capsys, "maj-cor", "--k", 1, "--m", 3, "--method", "brute", "--deterministic")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == "v1" and "timestamp" not in rep
    assert rep["value"] == 0.5 and round(rep["bound"], 4) == 0.3676 and rep["passed"]


def test_timestamp_present_by_default(capsys):
    _, out, _ = run(capsys, "maj-cor", "--k", 1, "--m", 3)
    assert "timestamp" in json.loads(out)


@pytest.mark.parametrize("argv", [
    ["maj-cor", "--k", "1", "--m", "4"],
    ["gen-majority", "--m", "4"],
    ["lowerbound", "--k", "3", "--alpha", "0.5"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["exit_code"] == 2


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "junta-opt", "--dist", tmp_path / "nope.json")
    assert code == 2 and json.loads(err)["error"] == "InvalidArgumentError"


def test_resource_limit_exit_3(capsys):
    code, _, err = run(capsys, "gen-majority", "--m", 21)
    assert code == 3 and json.loads(err)["exit_code"] == 3


def test_unlucky_example(capsys, files):
    code, out, _ = run(capsys, "unlucky", "--dist", files["dist"], "--k", 1, "--alpha", 0.2,
                       "--nmax", 3, "--deterministic")
    rep = json.loads(out)
    assert code == 0 and rep["unlucky"] == []
    assert [r["OPT_n"] for r in rep["rows"]] == [0.25, 0.1875, 0.125, 0.0]


def test_csv_is_rfc4180(capsys, files):
    _, out, _ = run(capsys, "junta-opt", "--dist", files["dist"], "--format", "csv")
    assert out.count("\r\n") == 5
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[2]["coords"] == "[0, 1]" and rows[3]["OPT_n"] == "0.0"


def test_gen_random_dist_byte_identical(capsys, files):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    for p in (a, b):
        assert run(capsys, "gen-random-dist", "--m", 2, "--seed", 7, "--out", p)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_audit_and_boost(capsys, files):
    code, out, _ = run(capsys, "audit", "--dist", files["dist"], "--predictor", files["f"],
                       "--k", 3, "--gamma", 0.1, "--deterministic")
    rep = json.loads(out)
    assert code == 0 and rep["rows"][0]["beta"] == 0.5 and not rep["passed"]
    trace = files["dir"] / "trace.json"
    code, out, _ = run(capsys, "boost", "--dist", files["dist"], "--predictor", files["f"],
                       "--auditors", files["aud"], "--gamma", 0.1, "--trace", trace,
                       "--deterministic")
    rep = json.loads(out)
    assert code == 0 and rep["iterations"] == 1 and rep["final_max_violation"] == 0.0
    assert json.loads(trace.read_text())["final"]["kind"] == "table"


def test_proper_srm_verify_lowerbound(capsys, files):
    code, out, _ = run(capsys, "proper", "--spec", "xent", "--dist", files["dist"],
                       "--auditors", files["aud"], "--gamma", 0.1, "--deterministic")
    assert code == 0 and json.loads(out)["rows"][0]["beta"] == 0.5
    code, out, _ = run(capsys, "srm", "--dist", files["dist"], "--k", 1, "--alpha", 0.3,
                       "--deterministic")
    rep = json.loads(out)
    assert code == 0 and rep["n_star"] == 0 and rep["objective"] == 0.25
    code, out, _ = run(capsys, "verify-upper", "--dist", files["dist"], "--k", 1, "--alpha", 0.2)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "lowerbound", "--k", 1, "--alpha", 0.02)
    assert code == 0 and json.loads(out)["count_ok"]


def test_compose_check(capsys, files):
    from mcopt import nncompose, predict
    f, c, _ = nncompose.random_pair(3, 5)
    fp, cp = files["dir"] / "fn.json", files["dir"] / "cn.json"
    fp.write_text(json.dumps(predict.dag_to_json(f)))
    cp.write_text(json.dumps(predict.dag_to_json(c)))
    code, out, _ = run(capsys, "compose-check", "--f", fp, "--c", cp, "--beta", 0.4,
                       "--samples", 200, "--deterministic")
    rep = json.loads(out)
    assert code == 0 and rep["count_ok"]
    assert rep["node_count_h"] == f.size + c.size + 2
    assert rep["max_abs_discrepancy"] <= 1e-9


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "mcopt", "maj-cor", "--k", "3", "--m", "5",
                           "--method", "fourier", "--deterministic"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["value"] == pytest.approx(0.625)
