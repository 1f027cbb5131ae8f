import json
import subprocess
import sys

import numpy as np
import pytest

from chlab.cli import run
from chlab.hvmodel import model_from_dict, random_factorized
from chlab.scenario import Behavior

CANONICAL = ["--a", "0", "--a2", "270", "--b", "135", "--b2", "45"]


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fair_file(tmp_path, fair):
    path = tmp_path / "fair.json"
    path.write_text(json.dumps(fair.to_dict()), encoding="utf-8")
    return str(path)


@pytest.fixture
def model_file(tmp_path):
    m = random_factorized(np.random.default_rng(3), 3)
    path = tmp_path / "model.json"
    path.write_text(json.dumps(m.to_dict()), encoding="utf-8")
    return str(path)


def test_ch_singlet(capsys):
    code, out, _ = invoke(capsys, "ch", "--singlet", *CANONICAL)
    assert code == 0
    data = json.loads(out)
    assert data["S"] == 0.207106781
    assert data["upper_ok"] is False


def test_ch_csv(capsys):
    code, out, _ = invoke(capsys, "ch", "--singlet", *CANONICAL, "--format", "csv")
    assert out.splitlines()[1] == "0.207106781,true,false"


def test_vertices(capsys):
    code, out, _ = invoke(capsys, "vertices")
    data = json.loads(out)
    assert len(data["rows"]) == 16 and data["max_S"] == 0.0 and data["min_S"] == -1.0
    code, out, _ = invoke(capsys, "vertices", "--format", "csv")
    assert len(out.splitlines()) == 17


def test_lp_fair(capsys, fair_file):
    code, out, _ = invoke(capsys, "lp", "--behavior", fair_file)
    assert code == 0 and json.loads(out)["status"] == "Feasible"


def test_lp_singlet_certificate(capsys):
    code, out, _ = invoke(capsys, "lp", "--singlet")
    cert = json.loads(out)["certificate"]
    assert cert["target_value"] > cert["vertex_max"]


def test_quantum_roundtrip(capsys):
    code, out, _ = invoke(capsys, "quantum", "--singlet", *CANONICAL)
    data = json.loads(out)
    b = Behavior.from_dict(data["behavior"])
    assert b.joint[0][0] == pytest.approx(0.426776695, abs=1e-12)
    assert data["schmidt_rank"] == 2


def test_sweep_csv(capsys):
    code, out, _ = invoke(capsys, "sweep", "--singlet", "--start", "0", "--stop", "90", "--step", "1")
    lines = out.splitlines()
    assert lines[0] == "param_deg,S,lower_ok,upper_ok" and len(lines) == 92
    assert "45.000000000,0.207106781,true,false" in lines


def test_lhv_and_audit(capsys, model_file):
    code, out, _ = invoke(capsys, "lhv", "--model", model_file)
    data = json.loads(out)
    assert -1.0 <= data["ch"]["S"] <= 0.0
    code, out, _ = invoke(capsys, "audit", "--model", model_file)
    rows = json.loads(out)
    assert len(rows) == 4
    for r in rows:
        assert abs(r["joint"] - r["side1_average"] * r["side2_conditional_average"] - r["covariance"]) < 2e-9


def test_audit_two_point(capsys, tmp_path):
    path = tmp_path / "two.json"
    two = {"type": "sequential", "weights": [0.5, 0.5],
           "r1": [[[1, 0], [1, 0]], [[1, 0], [1, 0]]],
           "r2_given_plus": [[[1, 0], [1, 0]], [[1, 0], [1, 0]]]}
    path.write_text(json.dumps(two), encoding="utf-8")
    code, out, _ = invoke(capsys, "audit", "--model", str(path))
    assert all(r["covariance"] == 0.25 for r in json.loads(out))


def test_independence(capsys):
    code, out, _ = invoke(capsys, "independence", "--singlet", "--a", "0", "--a2", "0", "--b", "45", "--b2", "45")
    data = json.loads(out)
    assert data["parameter_independence_gap"] == 0.0
    assert data["outcome_independence_gap"] == 0.353553391


def test_fit(capsys, fair_file):
    code, out, _ = invoke(capsys, "fit", "--behavior", fair_file, "--lambdas", "1", "--starts", "2", "--budget", "100")
    data = json.loads(out)
    assert data["residual_inf"] < 1e-6
    model_from_dict(data["best_model"])


def test_mc_byte_identical(capsys):
    args = ("mc", "--singlet", "--n", "20000", "--seed", "7")
    code1, out1, err1 = invoke(capsys, *args)
    code2, out2, err2 = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2 and err1 == err2
    assert err1.splitlines()[0].startswith("pair=(0,0) n=20000 p12_hat=")


def test_out_file(capsys, tmp_path):
    target = tmp_path / "v.csv"
    code, out, _ = invoke(capsys, "vertices", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8").startswith("strategy,S")


def test_exit_codes(capsys, tmp_path):
    code, _, err = invoke(capsys, "bogus")
    assert code == 2 and "usage" in err
    code, _, err = invoke(capsys, "ch", "--nope")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"joint": [[0.9, 0], [0, 0]], "single1": [0.5, 0.5], "single2": [0.5, 0.5]}))
    code, _, err = invoke(capsys, "ch", "--behavior", str(bad))
    assert code == 2 and "frechet" in err
    code, _, _ = invoke(capsys, "ch", "--singlet", "--tol", "-1")
    assert code == 2
    code, _, _ = invoke(capsys, "lp", "--behavior", str(tmp_path / "missing.json"))
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chlab.cli", "vertices", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "strategy,S"
