"""Command-line behavior: exit codes, JSON determinism, output content."""

from __future__ import annotations

import json

import pytest

from bts.cli import main

DIAG = {"d": 3, "mu": None, "entries": {"000": "1", "111": "2"}}
CUBIC = {"d": 3, "mu": [3], "entries": {"0": "1", "3": "1"}}


@pytest.fixture
def diag_file(tmp_path):
    p = tmp_path / "diag.json"
    p.write_text(json.dumps(DIAG))
    return str(p)


@pytest.fixture
def cubic_file(tmp_path):
    p = tmp_path / "cubic.json"
    p.write_text(json.dumps(CUBIC))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_svals_diagonal(capsys, diag_file):
    code, out, _ = run(capsys, "svals", "--input", diag_file, "--seed", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["ed_degree"] == 6 and len(doc["data"]) == 6
    assert max(d["residual"] for d in doc["data"]) < 1e-9
    assert doc["best_rank_one"]["distance"] == pytest.approx(1.0, abs=1e-9)


def test_svals_malformed_json_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"d": 3, "mu": null garbage}')
    code, _, err = run(capsys, "svals", "--input", str(p))
    assert code == 2
    assert "line 1" in err and "column" in err


def test_svals_mu_override_symmetric(capsys, tmp_path):
    # dense symmetric tensor recompressed as mu=(3): three eigen data
    entries = {"000": "1", "111": "1"}
    p = tmp_path / "sym.json"
    p.write_text(json.dumps({"d": 3, "mu": None, "entries": entries}))
    code, out, _ = run(capsys, "svals", "--input", str(p), "--mu", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["mu"] == [3] and len(doc["data"]) == 3


def test_svals_mu_override_rejects_asymmetric(capsys, tmp_path):
    p = tmp_path / "asym.json"
    p.write_text(json.dumps({"d": 3, "mu": None, "entries": {"010": "1", "100": "2"}}))
    code, _, err = run(capsys, "svals", "--input", str(p), "--mu", "2,1")
    assert code == 2
    assert "not mu-symmetric" in err


def test_verify_product_json_deterministic(capsys):
    args = ("verify-product", "--mu", "1,1,1", "--trials", "3", "--seed", "42",
            "--jobs", "1", "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["failures"] == 0 and doc["max_rel_error"] < 1e-8


def test_verify_product_parallel_matches_serial(capsys):
    base = ("verify-product", "--mu", "2,1", "--trials", "4", "--seed", "9", "--format", "json")
    _, serial, _ = run(capsys, *base, "--jobs", "1")
    _, parallel, _ = run(capsys, *base, "--jobs", "2")
    assert serial == parallel


def test_verify_product_exact_matrix_flag(capsys):
    code, out, _ = run(capsys, "verify-product", "--mu", "1,1", "--trials", "2",
                       "--seed", "4", "--jobs", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all("determinant" in r["note"] for r in doc["rows"])


def test_verify_product_symmetric_constant_stable(capsys):
    code, out, _ = run(capsys, "verify-product", "--mu", "3", "--trials", "5",
                       "--seed", "2", "--jobs", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["constant_values"]) == 1


def test_degrees_d3(capsys):
    code, out, _ = run(capsys, "degrees", "--d", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["ed_degree"] == 6 and doc["delta_mu"] == 4 and doc["identity_ok"]
    empty = next(r for r in doc["rows"] if r["selected_parts"] == [])
    assert empty["deg_f"] == 4 and empty["alpha"] == -2


def test_degrees_mu_21_trivial_flag(capsys):
    code, out, _ = run(capsys, "degrees", "--mu", "2,1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    row = next(r for r in doc["rows"] if r["selected_parts"] == [2])
    assert not row["hypersurface"] and row["deg_f"] == 0 and row["inert"]


def test_degrees_d12_identity(capsys):
    code, out, _ = run(capsys, "degrees", "--d", "12", "--format", "json")
    assert code == 0
    assert json.loads(out)["identity_ok"]


def test_invariants_rational_output(capsys, cubic_file):
    code, out, _ = run(capsys, "invariants", "--input", cubic_file, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["theta"] == ["2", "2", "2", "2"]
    assert doc["extra_root"] == "1/2"
    assert doc["delta_q"] == "2"


def test_edpoly_command(capsys, diag_file):
    code, out, _ = run(capsys, "edpoly", "--input", diag_file, "--seed", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["edpoly_dual"]) == 7
    assert doc["edpoly_dual"][0] == pytest.approx(1024.0, rel=1e-8)
    # reflection consistency: top coefficients agree up to (-1)^degree
    degree = len(doc["edpoly_dual"]) - 1
    assert doc["edpoly_primal"][-1] == pytest.approx(
        (-1) ** degree * doc["edpoly_dual"][-1], rel=1e-9
    )


def test_random_check(capsys):
    code, out, _ = run(capsys, "random-check", "--trials", "3", "--seed", "11", "--format", "json")
    assert code == 0
    assert json.loads(out)["failures"] == []


def test_bts_threads_caps_jobs(capsys, monkeypatch):
    monkeypatch.setenv("BTS_THREADS", "1")
    code, out, _ = run(capsys, "verify-product", "--mu", "1,1", "--trials", "2",
                       "--seed", "1", "--format", "json")
    assert code == 0


def test_svals_json_byte_identical(capsys, diag_file):
    args = ("svals", "--input", diag_file, "--seed", "3", "--format", "json")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_verify_product_unsupported_mu(capsys):
    code, _, err = run(capsys, "verify-product", "--mu", "4", "--trials", "1")
    assert code == 2
    assert "supports" in err
