import csv
import json

import pytest

from nilricci.cli import run


def run_json(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_certify_positive(capsys):
    code, out = run_json(capsys, "certify", "--algebra", "abelian1", "--k", "35", "--m", "1")
    assert code == 0 and out["verdict"] == "positive"
    assert set(out) == {"params", "mode", "verdict", "min_margin", "witness_r"}


def test_certify_not_positive(capsys):
    code, out = run_json(capsys, "certify", "--algebra", "abelian1", "--k", "1", "--m", "1")
    assert code == 1 and out["verdict"] == "not_positive" and out["witness_r"] > 0


def test_certify_grid_mode(capsys):
    code, out = run_json(capsys, "certify", "--algebra", "abelian1", "--k", "35", "--mode", "grid")
    assert code == 0 and out["mode"] == "grid" and out["min_margin"] > 0


def test_inconclusive_exit_code(capsys, monkeypatch):
    from nilricci import quotient
    from nilricci.sturm import PolyCertificate
    monkeypatch.setattr(quotient, "certify_expr", lambda e, n, label="": PolyCertificate(
        label, "inconclusive", "none", 999, "positive", None, reason="degree overflow"))
    code = run(["certify", "--algebra", "heisenberg3", "--k", "658"])
    out = json.loads(capsys.readouterr().out)
    assert code == 3 and out["verdict"] == "inconclusive"


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["certify", "--algebra", "abelian1"], ["certify", "--algebra", "nope7", "--k", "3"],
    ["certify", "--algebra", "abelian1", "--k", "0"], ["scan", "--algebra", "abelian1", "--k", "2", "--steps", "1"],
    ["topology", "--demo", "other"], ["oracle"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_topology_gysin(capsys):
    assert run(["topology", "--demo", "gysin"]) == 0
    out = capsys.readouterr().out
    assert "|det| = 1" in out and "e^2 = 2*x1^x2^x3^x4" in out


def test_topology_pontryagin(capsys):
    assert run(["topology", "--demo", "pontryagin", "--class", "x1^x2 + x3^x4", "--k", "5", "--m", "2",
                "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["p1"] == "-40*x1^x2^x3^x4"


def test_scan_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["scan", "--algebra", "abelian2", "--k", "2", "--m", "1", "--r-max", "4", "--steps", "9"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["r", "ric_rr", "ric_u", "ric_y_2", "ric_wprime", "err_rr", "err_u", "err_y_2",
                       "offdiag_bound", "gershgorin_min"]
    assert len(rows) == 10
    # r = 0: 2(alpha_1 + alpha_2) + 3 * 3/2 from the total space, 3 - 2 alpha_1 from the error
    assert float(rows[1][1]) == pytest.approx(2 * (15 / 4 + 13 / 8) + 4.5 + (3 - 7.5))


def test_validate_file(tmp_path, capsys):
    good = tmp_path / "h.json"
    good.write_text(json.dumps({"name": "h", "dim": 3, "brackets": [{"i": 2, "j": 3, "coeffs": {"1": "1"}}]}))
    before = good.read_bytes()
    code, out = run_json(capsys, "validate", str(good))
    assert code == 0 and out["passed"] and out["commutation_condition"]
    assert good.read_bytes() == before
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"name": "b", "dim": 4, "brackets": [{"i": 2, "j": 3, "coeffs": {"4": 1}}]}))
    code, out = run_json(capsys, "validate", str(bad))
    assert code == 1 and out["violations"][0]["check"] == "adapted"
    assert run(["validate", str(tmp_path / "missing.json")]) == 2


def test_algebra_from_file(tmp_path, capsys):
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"name": "h", "dim": 3, "brackets": [{"i": 2, "j": 3, "coeffs": {"1": 1}}]}))
    code, out = run_json(capsys, "certify", "--algebra", str(path), "--k", "665")
    assert code == 0 and out["params"]["algebra"] == "h"


def test_catalog_and_mink(capsys):
    code, rows = run_json(capsys, "catalog")
    assert code == 0 and {r["name"] for r in rows} >= {"abelian1", "twisted4", "ut4"}
    code, out = run_json(capsys, "mink", "--algebra", "abelian1", "--m", "1")
    assert code == 0 and out["min_k"] == 33 and out["k0"] == 32 and out["threshold"] == 35


def test_oracle_identity_suite(capsys):
    code, out = run_json(capsys, "oracle", "--suite", "identity")
    assert code == 0 and out["passed"] and len(out["identity"]) == 9
