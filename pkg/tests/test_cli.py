import json

import numpy as np
import pytest

from hyperbm.cli import run_command


def test_kernel_eval_cauchy_peak(capsys):
    assert run_command(["kernel-eval", "--space", "real", "--n", "1", "--y", "1", "--xi", "0"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].startswith("# manifest: ")
    assert lines[1] == "x1,density"
    assert round(float(lines[2].split(",")[1]), 7) == 0.3183099


def test_kernel_eval_grid_to_file(tmp_path):
    out = tmp_path / "k.csv"
    assert run_command(["kernel-eval", "--space", "complex", "--n", "2", "--grid=-1,1,3", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2 + 27
    vals = np.array([float(r.split(",")[-1]) for r in rows[2:]])
    assert abs(vals.max() - 8 / np.pi ** 2) < 1e-12
    man = json.loads(rows[0][len("# manifest: "):])
    assert man["space"] == "complex" and man["n"] == 2


def test_simulate_is_bit_identical(tmp_path):
    out = tmp_path / "q.csv"
    argv = ["simulate", "--space", "quaternionic", "--n", "2", "--t", "1", "--dt", "0.001",
            "--samples", "1", "--seed", "1", "--out", str(out)]
    assert run_command(argv) == 0
    first = out.read_bytes()
    assert run_command(argv) == 0
    assert out.read_bytes() == first
    rows = first.decode().splitlines()
    assert rows[1].split(",")[:3] == ["sample", "t", "x1"]
    assert len(rows) == 2 + 1001


def test_simulate_terminal_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    assert run_command(["simulate", "--space", "real", "--n", "2", "--t", "0.5", "--dt", "0.01",
                        "--samples", "3", "--terminal", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[2:]
    assert len(rows) == 3
    from hyperbm.core import SimConfig
    from hyperbm.real_space import RealPoint, sample_real_terminal
    term = sample_real_terminal(RealPoint([0.0, 0.0], 1.0), SimConfig(7, 0.01, 0.5, 3), 0)
    assert float(rows[1].split(",")[2]) == term.x[1, 0]


@pytest.mark.parametrize("argv", [
    ["verify-clt", "--space", "bogus"],
    ["verify-clt", "--dt", "-1"],
    ["simulate", "--space", "complex", "--n", "1"],
    ["kernel-eval", "--space", "real", "--n", "2", "--xi", "0"],
    ["kernel-eval"],
    ["no-such-command"],
])
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_command(argv) == 2


def test_verify_exit_status_reflects_reports(tmp_path):
    out = tmp_path / "inv.json"
    code = run_command(["verify-invariants", "--mc-points", "100000", "--out", str(out)])
    data = json.loads(out.read_text())
    assert code == (0 if data["passed"] else 1)
    assert data["manifest"]["command"] == "verify-invariants"
    assert all(set(r) >= {"name", "statistic", "threshold_or_pvalue", "n_used", "passed", "details"}
               for r in data["reports"])


def test_verify_clt_small_run_writes_failing_report(tmp_path):
    # at T = 2 the finite-horizon offset is large, so the check must fail and say so
    out = tmp_path / "clt.json"
    code = run_command(["verify-clt", "--space", "real", "--t", "2", "--dt", "0.01", "--samples", "2000",
                        "--out", str(out)])
    data = json.loads(out.read_text())
    assert code == 1 and data["passed"] is False
    assert data["manifest"]["config"]["horizon"] == 2.0
