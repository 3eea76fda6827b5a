import json
import subprocess
import sys

import pytest

from gbshash.cli import main


@pytest.fixture
def circuit_file(tmp_path):
    path = tmp_path / "circuit.json"
    assert main(["params", "gen", "--n", "8", "--depth", "8", "--seed", "42", "-o", str(path)]) == 0
    return path


def test_params_gen_byte_identical(tmp_path, capsys):
    args = ["params", "gen", "--n", "16", "--depth", "16", "--topology", "brickwork",
            "--boundary", "periodic", "--seed", "42", "-o"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + [str(a)]) == 0
    assert main(args + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(json.loads(a.read_text())["theta"]) == 16
    assert "sha256:" in capsys.readouterr().out


def test_odd_periodic_is_precondition_error(tmp_path, capsys):
    code = main(["params", "gen", "--n", "15", "--depth", "4", "-o", str(tmp_path / "x.json")])
    assert code == 3
    assert "even" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["params", "gen", "--n", "4", "--depth", "1", "-o", "x", "--bogus"])
    assert exc.value.code == 2


def test_hash_trivial_input_warns(circuit_file, capsys):
    assert main(["hash", "--circuit", str(circuit_file), "--k", "1", "--input", "00000000"]) == 0
    out = capsys.readouterr()
    assert out.out.strip() == "00000000"
    assert "warning" in out.err


def test_hash_repeatable_and_verbose(circuit_file, capsys):
    argv = ["hash", "--circuit", str(circuit_file), "--input", "10110010", "--verbose"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert "mu = " in first and "margin" in first


def test_hash_shot_emulated_label(circuit_file, capsys):
    argv = ["hash", "--circuit", str(circuit_file), "--input", "10110010", "--shots", "200000", "--noise-seed", "7"]
    assert main(argv) == 0
    assert "shot-emulated" in capsys.readouterr().out


def test_hash_wrong_length(circuit_file):
    assert main(["hash", "--circuit", str(circuit_file), "--input", "101"]) == 3


def test_missing_circuit_file(tmp_path):
    assert main(["bench", "confusion", "--circuit", str(tmp_path / "nope.json")]) == 3


@pytest.mark.parametrize("kind", ["confusion", "diffusion", "collision", "percentiles", "shots"])
def test_bench_reports_record_flags(kind, circuit_file, tmp_path, capsys):
    out = tmp_path / "reports"
    assert main(["bench", kind, "--circuit", str(circuit_file), "--out", str(out)]) == 0
    doc = json.loads((out / f"{kind}.json").read_text())
    assert doc["header"]["flags"]["circuit"] == str(circuit_file)
    assert doc["header"]["code_version"]
    assert capsys.readouterr().out.startswith(kind)


def test_collision_summary_prints_bound(circuit_file, capsys):
    main(["bench", "collision", "--circuit", str(circuit_file), "--out", ""])
    assert "N_bound=" in capsys.readouterr().out


def test_enumeration_cap_exit(tmp_path):
    path = tmp_path / "big.json"
    main(["params", "gen", "--n", "18", "--depth", "0", "-o", str(path)])
    assert main(["bench", "confusion", "--circuit", str(path), "--out", ""]) == 3


def test_shots_injected_sigma(capsys):
    assert main(["bench", "shots", "--sigma-max", "23", "--z", "2", "--k", "1", "--out", ""]) == 0
    assert "N_shot_max=211600" in capsys.readouterr().out


def test_haar_small(tmp_path, capsys):
    assert main(["bench", "haar-test", "--n", "6", "--depth", "6", "--realizations", "100",
                 "--out", str(tmp_path)]) == 0
    assert "overlap" in capsys.readouterr().out
    assert (tmp_path / "haar_test_amplitude.csv").exists()


def test_oracle_verify_codes(capsys):
    assert main(["bench", "oracle-verify", "--n", "3", "--trials", "1", "--inputs", "2", "--out", ""]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["bench", "oracle-verify", "--n", "3", "--cutoff", "12", "--trials", "1", "--out", ""]) == 3
    code = main(["bench", "oracle-verify", "--n", "3", "--cutoff", "12", "--trials", "2", "--inputs", "5",
                 "--no-cutoff-check", "--out", ""])
    assert code == 4
    assert "FAIL" in capsys.readouterr().out


def test_console_entry_point(tmp_path):
    path = tmp_path / "c.json"
    proc = subprocess.run([sys.executable, "-m", "gbshash.cli", "params", "gen", "--n", "5", "--depth", "2",
                           "-o", str(path)], capture_output=True, text=True)
    assert proc.returncode == 3 and "even" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "gbshash.cli", "bench"], capture_output=True, text=True)
    assert proc.returncode == 2
