"""CLI surface: subcommands, exit codes, JSON determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

import tensor_spectra as ts
from tensor_spectra.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ======================================================================
# count / table
# ======================================================================


def test_count_plain(capsys):
    code, out, _ = run(capsys, "count", "3", "3", "3")
    assert code == 0 and out.strip() == "37"


def test_count_partition(capsys):
    code, out, _ = run(capsys, "count", "--partition", "3", "/", "3")
    assert code == 0 and out.strip() == "7"
    code, out, _ = run(capsys, "count", "--partition", "2", "1", "/", "3", "3")
    assert code == 0 and out.strip() == "13"


def test_count_pencil(capsys):
    code, out, _ = run(capsys, "count", "--pencil", "3", "3")
    assert code == 0 and out.strip() == "12"


def test_count_json_format(capsys):
    code, out, _ = run(capsys, "count", "2", "2", "2", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"dims": [2, 2, 2], "count": 6}


def test_count_bad_partition_is_exit_2(capsys):
    code, _, err = run(capsys, "count", "--partition", "3", "/", "3", "3")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "count", "--partition", "3", "3")
    assert code == 2
    code, _, err = run(capsys, "count")
    assert code == 2


def test_table_text_and_csv(capsys):
    code, out, _ = run(capsys, "table")
    assert code == 0
    assert any(line.split() == ["3", "3", "3", "37"] for line in out.splitlines())
    code, out, _ = run(capsys, "table", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m1,m2,m3,count"
    assert "5,5,8,3811" in lines
    assert "3,4,5,138" in lines


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--format", "json")
    rows = {tuple(r["dims"]): r["count"] for r in json.loads(out)}
    assert code == 0 and rows[(4, 4, 4)] == 240


# ======================================================================
# gen / solve round trips
# ======================================================================


@pytest.fixture()
def tensor_file(tmp_path, capsys):
    path = str(tmp_path / "t222.json")
    code, _, _ = run(capsys, "gen", "2", "2", "2", "--seed", "7",
                     "--field", "complex", "-o", path)
    assert code == 0
    return path


def test_gen_writes_loadable_tensor(tensor_file):
    T = ts.load_tensor(tensor_file)
    assert T.dims == (2, 2, 2)
    assert T == ts.random((2, 2, 2), seed=7, field="complex")


def test_solve_round_trip(tensor_file, capsys):
    code, out, _ = run(capsys, "solve", tensor_file, "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert rep["seed"] == 7
    assert rep["expected"] == 6 and rep["found"] == 6
    assert rep["incomplete"] is False
    assert len(rep["tuples"]) == 6
    for t in rep["tuples"]:
        assert len(t["vectors"]) == 3


def test_solve_is_byte_identical_for_fixed_seed(tensor_file, capsys):
    _, out1, _ = run(capsys, "solve", tensor_file, "--seed", "7")
    _, out2, _ = run(capsys, "solve", tensor_file, "--seed", "7")
    assert out1 == out2
    _, out3, _ = run(capsys, "solve", tensor_file, "--seed", "8")
    assert out3 != out1


def test_solve_incomplete_still_exits_zero(tensor_file, capsys):
    code, out, _ = run(capsys, "solve", tensor_file, "--restarts", "2")
    assert code == 0
    assert json.loads(out)["incomplete"] is True


def test_solve_missing_file_is_exit_2(capsys):
    code, _, err = run(capsys, "solve", "/nonexistent/file.json")
    assert code == 2 and "error" in err


def test_solve_malformed_file_is_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(capsys, "solve", str(p))[0] == 2
    p.write_text('{"dims": [2, 2]}')
    assert run(capsys, "solve", str(p))[0] == 2


def test_solve_cap_exceeded_is_exit_3(tmp_path, capsys):
    path = str(tmp_path / "big.json")
    run(capsys, "gen", "2", "2", "2", "2", "2", "2", "2",
        "--field", "complex", "-o", path)
    code, _, err = run(capsys, "solve", path)
    assert code == 3 and "cap" in err


def test_solve_partial_cli(tmp_path, capsys):
    path = str(tmp_path / "c333.json")
    run(capsys, "gen", "3", "3", "3", "--seed", "4", "--field", "complex",
        "-o", path)
    code, out, _ = run(capsys, "solve-partial", path, "--omega", "3",
                       "--symmetrize", "--seed", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["expected"] == 7 and rep["found"] == 7
    # omega must cover the order
    assert run(capsys, "solve-partial", path, "--omega", "2")[0] == 2


# ======================================================================
# approximation commands
# ======================================================================


def test_rank1_cli(tmp_path, capsys):
    path = str(tmp_path / "r.json")
    run(capsys, "gen", "3", "3", "--seed", "3", "-o", path)
    code, out, _ = run(capsys, "rank1", path, "--seed", "1")
    assert code == 0
    res = json.loads(out)
    M = ts.random((3, 3), seed=3).array.real
    top = np.linalg.svd(M, compute_uv=False)[0]
    assert abs(res["sigma"] - top) < 1e-9
    assert res["converged"] is True


def test_rank1_rejects_complex_input(tmp_path, capsys):
    path = str(tmp_path / "c.json")
    run(capsys, "gen", "2", "2", "--field", "complex", "-o", path)
    assert run(capsys, "rank1", path)[0] == 2


def test_rank1_sym_cli(tmp_path, capsys):
    path = str(tmp_path / "s.json")
    run(capsys, "gen", "2", "2", "3", "--seed", "9", "-o", path)
    code, out, _ = run(capsys, "rank1-sym", path, "--omega", "2", "1",
                       "--symmetrize")
    assert code == 0
    res = json.loads(out)
    assert res["omega"] == [2, 1]
    assert np.allclose(res["factors"][0], res["factors"][1])


def test_rankr_cli_and_feasibility_gate(tmp_path, capsys):
    path = str(tmp_path / "t.json")
    run(capsys, "gen", "2", "2", "2", "--seed", "5", "-o", path)
    code, _, err = run(capsys, "rankr", path, "--r", "2", "1", "1")
    assert code == 2
    assert "r_i^2 <= prod_j r_j" in err
    code, out, _ = run(capsys, "rankr", path, "--r", "2", "2", "2")
    assert code == 0
    assert json.loads(out)["error"] < 1e-12


# ======================================================================
# pencil / verify-diagonal
# ======================================================================


def test_pencil_cli(capsys):
    code, out, _ = run(capsys, "pencil", "3", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["expected"] == rep["found"] == 12


def test_pencil_cli_with_matrix_file(tmp_path, capsys):
    path = str(tmp_path / "m.json")
    B = ts.DenseTensor.from_array(np.array([[0.0, 1.0], [1.0, 0.0]]))
    ts.save_tensor(B, path)
    code, out, _ = run(capsys, "pencil", "2", "3", "--matrix", path)
    assert code == 0 and json.loads(out)["found"] == 4
    # wrong size is bad input
    assert run(capsys, "pencil", "3", "3", "--matrix", path)[0] == 2


def test_pencil_repeated_eigenvalues_is_exit_2(tmp_path, capsys):
    path = str(tmp_path / "eye.json")
    ts.save_tensor(ts.DenseTensor.from_array(np.eye(2)), path)
    assert run(capsys, "pencil", "2", "3", "--matrix", path)[0] == 2


def test_verify_diagonal_cli(capsys):
    code, out, _ = run(capsys, "verify-diagonal")
    assert code == 0
    rep = json.loads(out)
    assert rep["rows"] == 37 and rep["ok"] is True
    assert rep["max_residual_polished"] < 1e-12


# ======================================================================
# entry point wiring
# ======================================================================


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "tensor_spectra",
                           "count", "2", "2", "2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "6"
