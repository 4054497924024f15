import csv
import io
import json
import math
import subprocess
import sys
from dataclasses import replace
from fractions import Fraction

import pytest

from kohn_spectra import cli
from kohn_spectra.operator import assemble_full

from test_harmonics import H3_LISTING


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


# ---------------------------------------------------------------------- basis


def test_basis_m3_matches_listing(capsys):
    code, out, _ = run(capsys, "basis", "--m", "3")
    assert code == 0
    assert body(out) == H3_LISTING
    assert "dimension 16" in out


def test_basis_pq(capsys):
    code, out, _ = run(capsys, "basis", "--p", "0", "--q", "1")
    assert code == 0 and body(out) == ["-1 * zb2", "-1 * zb1"]
    code, out, _ = run(capsys, "basis", "--p", "2", "--q", "1", "--format", "json")
    assert code == 0 and len(json.loads(out)) == 4


def test_basis_needs_degrees(capsys):
    code, _, err = run(capsys, "basis", "--p", "2")
    assert code == 1 and "--m" in err


# --------------------------------------------------------------------- matrix


def test_matrix_header_and_round_trip(capsys):
    code, out, _ = run(capsys, "matrix", "--m", "3", "--t", "1/2")
    assert code == 0
    assert "# h factored out; h = 20/9" in out
    parsed = cli.parse_matrix(out)
    M = assemble_full(3, Fraction(1, 2))
    assert parsed == [list(row) for row in M.entries]


def test_matrix_json_round_trip(capsys):
    code, out, _ = run(capsys, "matrix", "--m", "2", "--t", "2/3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["h_factored"] and doc["m"] == 2 and doc["h"] == "117/25"
    assert len(doc["basis"]) == 9 and "generated" in doc
    assert cli.parse_matrix(out) == [list(r) for r in assemble_full(2, Fraction(2, 3)).entries]


def test_matrix_numeric_mode(capsys):
    code, out, _ = run(capsys, "matrix", "--m", "1", "--t", "1/2", "--mode", "numeric", "--no-header")
    rows = [list(map(float, line.split())) for line in out.splitlines()]
    assert code == 0 and len(rows) == 4 and rows[0][0] == 1.0


def test_no_header_output_is_deterministic(capsys):
    for argv in (
        ["matrix", "--m", "3", "--t", "1/3", "--no-header"],
        ["matrix", "--m", "2", "--t", "1/3", "--format", "json", "--no-header"],
        ["sweep", "--kmax", "3", "--t-grid", "1/4:3/4:1/4", "--no-header"],
        ["eigs", "--m", "2", "--t", "1/5", "--no-header"],
    ):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second
        assert "#" not in first[1] and "generated" not in first[1]


# ------------------------------------------------------------- blocks / eigs


def test_blocks_csv(capsys):
    code, out, _ = run(capsys, "blocks", "--k", "2", "--t", "1/2", "--no-header")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [(r["kind"], r["j"], r["d_j"], r["u_j_coeff"]) for r in rows] == [
        ("V", "1", "3", "12"),
        ("V", "2", "4", ""),
        ("W", "1", "19/4", "12"),
        ("W", "2", "3/4", ""),
    ]


def test_eigs_k2(capsys):
    code, out, _ = run(capsys, "eigs", "--k", "2", "--t", "1/2", "--format", "csv", "--no-header")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert all(r["multiplicity"] == "4" for r in rows)
    assert math.isclose(float(rows[0]["eigenvalue"]), 0.2315, abs_tol=1e-3)


def test_eigs_full_assembly_json(capsys):
    code, out, _ = run(capsys, "eigs", "--m", "3", "--t", "1/2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and sum(d["multiplicity"] for d in doc) == 16


# -------------------------------------------------------------- bound / sweep


def test_bound_csv(capsys):
    code, out, _ = run(capsys, "bound", "--k", "5", "--t", "1/2", "--no-header")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == cli.SWEEP_COLUMNS
    k, parity, t, h, lam, ratio, sqrt_k_bound, corrected = rows[1]
    assert (k, parity, float(t)) == ("5", "odd", 0.5)
    assert 0 < float(lam) <= float(ratio) <= float(corrected)


def test_sweep_grid_and_json(capsys):
    code, out, _ = run(capsys, "sweep", "--kmax", "9", "--t-grid", "0.05:0.95:0.05", "--no-header")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9 * 19
    assert rows[0]["t"] == "0.050000000000000003"
    code, out, _ = run(capsys, "sweep", "--kmax", "2", "--t", "1/2", "--parity", "both", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and [d["parity"] for d in doc] == ["odd", "odd", "even", "even"]
    assert doc[2]["det_ratio"] is None and doc[0]["holds"] is True


def test_out_file(tmp_path, capsys):
    target = tmp_path / "bound.csv"
    code, out, _ = run(capsys, "bound", "--k", "2", "--t", "1/3", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().count("\n") >= 2


# ------------------------------------------------------------------ exit codes


@pytest.mark.parametrize(
    "argv",
    [
        ["matrix", "--m", "3", "--t", "3/2"],
        ["matrix", "--m", "3", "--t", "abc"],
        ["matrix", "--m", "3"],
        ["blocks", "--k", "0"],
        ["bound", "--k", "2", "--t", "0"],
        ["sweep", "--kmax", "2", "--t-grid", "1/2:1/4:1/4"],
        ["eigs", "--k", "2", "--t", "1/2", "--tol", "0"],
        ["nonsense"],
        ["matrix", "--m", "3", "--t", "1/2", "--format", "xml"],
    ],
)
def test_config_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        sys.exit(cli.main(argv))
    assert info.value.code == 1


def test_failed_bound_exits_2(capsys, monkeypatch):
    real = cli.bound_chain
    monkeypatch.setattr(cli, "bound_chain", lambda *a, **kw: replace(real(*a, **kw), holds=False))
    code, _, err = run(capsys, "bound", "--k", "3", "--t", "1/2")
    assert code == 2 and "violated" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kohn_spectra", "eigs", "--k", "1", "--t", "1/2", "--no-header"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.split()[0] == "eigenvalue"
