"""Command-line surface: subcommands, exit codes, JSON outputs."""

import json

import pytest

from cvcompile.cli import main


def run(args):
    return main(args)


def test_decompose_triple_exact(tmp_path, capsys):
    out = tmp_path / "c.json"
    rc = run(["decompose", "x1*x2*x3", "--t", "0.05", "--method", "exact",
              "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["counts"]["total_excluding_fourier"] == 17
    assert data["error_bound"] == 0.0
    assert data["circuit"]["convention"]["order"] == "first-applied-first"


def test_decompose_generalized_count(tmp_path):
    out = tmp_path / "c.json"
    rc = run(["decompose", "x1*x2*x3", "--t", "0.05", "--method", "exact-generalized",
              "--out", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["counts"]["total_excluding_fourier"] == 20


def test_decompose_auto_quadratic(tmp_path):
    out = tmp_path / "c.json"
    rc = run(["decompose", "x1^2", "--t", "1", "--method", "auto", "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["method"] == "gaussian"
    kinds = [g["kind"] for g in data["circuit"]["gates"]]
    assert kinds == ["R", "T", "R"]


def test_decompose_mixed_basis_exit_2(capsys):
    rc = run(["decompose", "x1*p1", "--method", "exact"])
    assert rc == 2
    assert "commutator" in capsys.readouterr().err


def test_decompose_ineligible_exit_2(capsys):
    rc = run(["decompose", "x1^5", "--method", "exact"])
    assert rc == 2


def test_verify_pass_and_corrupted(tmp_path, capsys):
    # exp(i x²/4) is the unit-strength quadratic phase at hbar = 2
    circ_path = tmp_path / "p1.json"
    rc = run(["decompose", "x1^2", "--t", "0.25", "--method", "gaussian",
              "--out", str(tmp_path / "r.json"), "--circuit-out", str(circ_path)])
    assert rc == 0
    rc = run(["verify", str(circ_path), "x1^2", "--t", "0.25", "--cutoff", "24",
              "--subspace", "6", "--tol", "1e-6", "--out", str(tmp_path / "v.json")])
    assert rc == 0
    rep = json.loads((tmp_path / "v.json").read_text())
    assert rep["distance"] < 1e-6
    # corrupt one sign
    data = json.loads(circ_path.read_text())
    data["gates"][1]["params"][0] *= -1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    rc = run(["verify", str(bad), "x1^2", "--t", "0.25", "--cutoff", "24",
              "--subspace", "6", "--tol", "1e-6"])
    assert rc == 3


def test_verify_empty_circuit_identity(tmp_path):
    circ = {"num_modes": 1, "gates": [], "ancillae": [],
            "convention": {"hbar": 2.0, "order": "first-applied-first"}}
    path = tmp_path / "id.json"
    path.write_text(json.dumps(circ))
    rc = run(["verify", str(path), "0", "--t", "0", "--cutoff", "8",
              "--subspace", "4", "--tol", "1e-9"])
    assert rc == 0


def test_count_command(tmp_path, capsys):
    circ_path = tmp_path / "c.json"
    run(["decompose", "x1*x2*x3", "--t", "0.05", "--method", "exact",
         "--out", str(tmp_path / "r.json"), "--circuit-out", str(circ_path)])
    rc = run(["count", str(circ_path)])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["total_excluding_fourier"] == 17


def test_table1_json(capsys):
    rc = run(["table1", "--json"])
    assert rc == 0
    rows = json.loads(capsys.readouterr().out)
    by_label = {r["target"]: r for r in rows}
    assert by_label["x1*x2*x3"]["exact"]["count"] == 17
    assert by_label["x1*x2*x3"]["generalized"]["count"] == 20
    assert by_label["x1^4"]["exact"]["count"] == 29
    assert by_label["x1^4"]["generalized"]["count"] is None
    assert by_label["x1^6"]["exact"]["count"] == 809


def test_kerr_command(capsys):
    rc = run(["kerr", "--chi", "1", "--squeeze", "8"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert abs(data["ratios"]["quartic_over_cubic"] - 8 ** -2 / (4 * 2)) < 1e-12
    assert data["cancellation"]["delta"] == 3 * 8**6 - 1


def test_parse_error_exit_2(capsys):
    rc = run(["decompose", "x1^^", "--method", "exact"])
    assert rc == 2
