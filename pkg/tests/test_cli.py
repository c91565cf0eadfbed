import json

import numpy as np
import pytest

from paper_data import X_SW

from cartan_synth.cli import read_matrix, run, write_matrix
from cartan_synth.matcore import expm_skew, haar_unitary, mabs
from cartan_synth.pauli import pauli_matrix


@pytest.fixture
def swap8(tmp_path):
    path = tmp_path / "swap8.json"
    write_matrix(path, X_SW)
    return path


def test_matrix_io_roundtrip(tmp_path):
    x = haar_unitary(4, np.random.default_rng(0))
    path = tmp_path / "m.json"
    write_matrix(path, x)
    assert mabs(read_matrix(path) - x) == 0.0  # 17 digits round-trips doubles


def test_swap_golden_run(swap8, tmp_path):
    out = tmp_path / "out.json"
    code = run(["--scheme", "ccd-new", "--qubits", "3",
                "--input", str(swap8), "--output", str(out), "--verify"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["verification"]["passed"]
    assert data["leaves"]
    for leaf in data["leaves"]:
        assert "terms" in leaf


def test_identity_empty_leaves(tmp_path):
    path = tmp_path / "id8.json"
    write_matrix(path, np.eye(8))
    out = tmp_path / "out.json"
    code = run(["--scheme", "kg", "--qubits", "3",
                "--input", str(path), "--output", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["leaves"] == []


def test_random4_ccd_new(tmp_path):
    rng = np.random.default_rng(7)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    x = expm_skew((h - h.conj().T) / 2)
    path = tmp_path / "random4.json"
    write_matrix(path, x)
    out = tmp_path / "out.json"
    code = run(["--scheme", "ccd-new", "--qubits", "2",
                "--input", str(path), "--output", str(out), "--verify"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["verification"]["reconstruction_error"] <= 1e-8


def test_bipartite_dims_flag(tmp_path):
    x = haar_unitary(6, np.random.default_rng(1))
    path = tmp_path / "u6.json"
    write_matrix(path, x)
    out = tmp_path / "out.json"
    code = run(["--scheme", "bipartite", "--dims", "2", "3",
                "--input", str(path), "--output", str(out), "--verify"])
    assert code == 0


def test_deterministic_output(swap8, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["--scheme", "ccd-new", "--qubits", "3", "--input", str(swap8),
            "--verify"]
    assert run(argv + ["--output", str(out1)]) == 0
    assert run(argv + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_dimension_mismatch_exit1(swap8, tmp_path):
    code = run(["--scheme", "ccd-new", "--qubits", "2",
                "--input", str(swap8), "--output", str(tmp_path / "o.json")])
    assert code == 1


def test_non_unitary_exit1(tmp_path):
    path = tmp_path / "bad.json"
    write_matrix(path, np.ones((4, 4)))
    code = run(["--scheme", "ccd-new", "--qubits", "2",
                "--input", str(path), "--output", str(tmp_path / "o.json")])
    assert code == 1


def test_verify_failure_exit2(swap8, tmp_path, monkeypatch):
    # corrupt the serialized leaves between write and verify
    import cartan_synth.cli as cli
    original = cli.factorization_from_dict

    def corrupted(data):
        fact = original(data)
        if fact.leaves:
            fact.leaves[0].matrix = expm_skew(1j * 0.5 * pauli_matrix("ZII"))
        return fact

    monkeypatch.setattr(cli, "factorization_from_dict", corrupted)
    out = tmp_path / "out.json"
    code = run(["--scheme", "ccd-new", "--qubits", "3",
                "--input", str(swap8), "--output", str(out), "--verify"])
    assert code == 2
    assert json.loads(out.read_text())["verification"]["passed"] is False


def test_env_tol_default(tmp_path, monkeypatch):
    monkeypatch.setenv("CARTAN_SYNTH_TOL", "1e-7")
    from cartan_synth.config import env_default_tol
    assert env_default_tol() == 1e-7


def test_emit_matrices(swap8, tmp_path):
    out = tmp_path / "out.json"
    code = run(["--scheme", "kg", "--qubits", "3", "--input", str(swap8),
                "--output", str(out), "--emit-matrices"])
    assert code == 0
    data = json.loads(out.read_text())
    assert all("matrix" in leaf for leaf in data["leaves"])


def test_pq_schedule_flag(tmp_path):
    x = haar_unitary(8, np.random.default_rng(2))
    path = tmp_path / "u8.json"
    write_matrix(path, x)
    out = tmp_path / "out.json"
    code = run(["--scheme", "bipartite", "--dims", "2", "4",
                "--pq-schedule", "1,1,2,2",
                "--input", str(path), "--output", str(out), "--verify"])
    assert code == 0
