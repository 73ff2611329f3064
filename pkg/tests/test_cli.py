"""Command-line interface tests: schemas, determinism, exit codes."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qmp.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cost_json_schema(capsys):
    code, out, _ = _run(capsys, "cost", "--kind", "qroam", "--n", "10",
                        "--m", "40", "--lambda", "4")
    assert code == 0
    report = json.loads(out)
    assert report["params"] == {"n": 10, "m": 40, "lambda": 4,
                                "controlled": False}
    assert set(report["total"]) == {"clifford_count", "t_count",
                                    "toffoli_count", "measurement_count",
                                    "qubit_count"}


def test_output_is_byte_identical_across_runs(capsys):
    argv = ("optimize", "--n", "14", "--m", "8", "--xi", "1", "--r", "16")
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second


def test_floats_carry_17_significant_digits(capsys):
    _, out, _ = _run(capsys, "optimize", "--n", "14", "--m", "8",
                     "--xi", "1", "--r", "16")
    improvement = json.loads(out)["improvement"]
    line = next(l for l in out.splitlines() if '"improvement"' in l)
    printed = line.split(":")[1].strip().rstrip(",")
    assert printed == format(improvement, ".17g")


def test_build_emits_parseable_circuit(tmp_path, capsys):
    path = tmp_path / "circuit.txt"
    code, out, _ = _run(capsys, "build", "--kind", "qroam", "--n", "5",
                        "--m", "3", "--lambda", "2", "--seed", "3",
                        "--emit", str(path))
    assert code == 0
    from qmp import from_text, validate
    circuit = from_text(path.read_text(encoding="utf-8"))
    assert validate(circuit) == []
    assert json.loads(out)["width"] == circuit.width


def test_simulate_reports_expected_output(capsys):
    code, out, _ = _run(capsys, "simulate", "--kind", "qroam", "--n", "4",
                        "--m", "2", "--lambda", "2", "--seed", "1",
                        "--input", "0x9")
    assert code == 0
    report = json.loads(out)
    assert report["outputs"] == report["expected"]


def test_verify_passes_on_correct_circuit(capsys):
    code, out, _ = _run(capsys, "verify", "--n", "4", "--m", "2",
                        "--t", "1", "--k-schedule", "1", "--lambda", "2",
                        "--seed", "7", "--samples", "16")
    assert code == 0
    assert json.loads(out)["mismatches"] == 0


def test_sweep_writes_csv(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_values": [10], "m": 4,
                                "xi_values": [1.0], "r_values": [2, 4]}),
                    encoding="utf-8")
    out_csv = tmp_path / "rows.csv"
    code, _, _ = _run(capsys, "sweep", "--spec", str(spec),
                      "--out", str(out_csv))
    assert code == 0
    lines = out_csv.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("n,m,xi,r,")
    assert len(lines) == 3


def test_resource_demo_checks_branches(capsys):
    code, out, _ = _run(capsys, "resource-demo", "--n", "3", "--m", "2",
                        "--c", "4", "--seed", "2", "--branches", "8")
    assert code == 0
    report = json.loads(out)
    assert report["branch_check"]["mismatches"] == 0
    assert report["ratio"] > 0


def test_apps_subcommands_emit_json(capsys):
    cases = [
        ("apps", "ampamp", "--p", "1e-4", "--r", "16"),
        ("apps", "alias", "--N", "2000"),
        ("apps", "sparse", "--fit-a", "2.5", "--fit-b", "1.78",
         "--n-orb", "100,200"),
        ("apps", "qpe", "--r", "16", "--mode", "sparse", "--n-orb", "150"),
        ("apps", "kretschmer", "--n", "6", "--eps", "1e-3",
         "--kind", "state"),
        ("apps", "mps", "--sites", "30", "--chi", "8"),
    ]
    for argv in cases:
        code, out, _ = _run(capsys, *argv)
        assert code == 0, argv
        json.loads(out)


def test_usage_error_exits_one(capsys):
    assert _run(capsys, "cost", "--n", "5")[0] == 1
    assert _run(capsys, "no-such-command")[0] == 1
    assert _run(capsys, "cost", "--kind", "qroam", "--n", "-3",
                "--m", "2")[0] == 1


def test_json_errors_flag_structures_stderr(capsys):
    code, _, err = _run(capsys, "--json-errors", "cost", "--n", "5")
    assert code == 1
    report = json.loads(err)
    assert report["error"] == "usage"


def test_entry_point_runs_as_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "qmp.cli", "cost", "--kind", "qroam",
         "--n", "8", "--m", "4", "--lambda", "2"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["total"]["toffoli_count"] > 0


def test_selftest_quick_passes(capsys):
    code, out, _ = _run(capsys, "selftest", "--quick")
    assert code == 0
    report = json.loads(out)
    assert all(suite["status"] == "pass" for suite in report.values())
