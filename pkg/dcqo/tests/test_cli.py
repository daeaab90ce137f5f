"""Tests for the command line runner"""

import csv
import json
import os

import pytest

from dcqo.circuit import load_circuit
from dcqo.cli import ExperimentConfig, main, write_atomic
from dcqo.exceptions import InvalidConfig
from dcqo.ising import ising_energy, random_spin_glass


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestExperimentConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(),
            dict(tsp="a.json", dense_qubo=4),
            dict(dense_qubo=4, algorithm="vqe"),
            dict(dense_qubo=4, time=0.0),
            dict(dense_qubo=4, cutoff=-0.1),
            dict(dense_qubo=4, convention="other"),
            dict(dense_qubo=4, top_k=0),
            dict(dense_qubo=4, top_k=2.5),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfig):
            ExperimentConfig(**kwargs)

    def test_source(self):
        cfg = ExperimentConfig(random_spin_glass=5, seed=3)
        assert cfg.source == "random-spin-glass:5:seed=3"
        assert cfg.optimizer().seed == 3


class TestSolve:
    def test_three_city_dcqo(self, tmp_path):
        out = tmp_path / "result.json"
        argv = ["solve", "--tsp", "tsp3.json", "--alg", "dcqo", "--steps", "2",
                "--cutoff", "0.1", "-o", str(out)]
        assert main(argv) == 0
        result = json.loads(out.read_text())
        assert result["num_qubits"] == 9
        assert result["two_qubit_gates"] == 36
        assert result["two_qubit_gates_unfused"] == 72
        assert result["cutoff"]["threshold"] == 0.1
        assert 0.0 <= result["success_probability"] <= 1.0
        assert result["tours"]
        assert os.listdir(tmp_path) == ["result.json"]

    def test_stdout(self, capsys):
        argv = ["solve", "--random-spin-glass", "4", "--alg", "dqa", "--steps", "3"]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["source"] == "random-spin-glass:4:seed=0"
        assert result["two_qubit_gates"] == 2 * 6 * 3
        assert "optimizer" not in result

    @pytest.mark.parametrize("alg", ["dqa", "dcqo"])
    def test_metrics_from_distribution(self, capsys, alg):
        argv = ["solve", "--random-spin-glass", "4", "--seed", "2", "--alg", alg]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        model = random_spin_glass(4, 2)
        dist = result["distribution"]
        assert sum(dist.values()) == pytest.approx(1.0)
        sp = sum(dist.get(b, 0.0) for b in result["ground_states"])
        assert result["success_probability"] == pytest.approx(sp, abs=1e-12)
        average = sum(p * ising_energy(model, b) for b, p in dist.items())
        assert result["average_energy"] == pytest.approx(average, abs=1e-12)
        assert result["approximation_ratio"] == pytest.approx(
            average / result["ground_energy"], rel=1e-12
        )

    def test_hdcqo(self, capsys):
        argv = ["solve", "--random-spin-glass", "3", "--alg", "hdcqo",
                "--variant", "per-one-body", "--max-iterations", "20",
                "--restarts", "2", "--top-k", "3"]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert len(result["optimizer"]["params"]) == 4
        assert len(result["optimizer"]["restart_costs"]) == 2
        assert len(result["top"]) == 3

    def test_qaoa_with_shots(self, capsys):
        argv = ["solve", "--dense-qubo", "4", "--alg", "qaoa", "--shots", "200",
                "--max-iterations", "20"]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["shots"] == 200

    def test_dump_circuit(self, tmp_path, capsys):
        path = tmp_path / "circuit.txt"
        argv = ["solve", "--tsp", "tsp3.json", "--dump-circuit", str(path)]
        assert main(argv) == 0
        circuit = load_circuit(path)
        assert circuit.width == 9
        assert circuit.metadata["builder"] == "dcqo"

    def test_step_cutoff(self, capsys):
        argv = ["solve", "--random-spin-glass", "4", "--alg", "dcqo-full",
                "--steps", "10", "--step-cutoff", "0.005"]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["two_qubit_gates"] < 10 * 6 * 4

    def test_missing_file(self, capsys):
        assert main(["solve", "--tsp", "nowhere.json"]) == 1
        error = json.loads(capsys.readouterr().err.splitlines()[-1])
        assert error["error"] == "InvalidConfig"

    def test_domain_error(self, capsys):
        assert main(["solve", "--dense-qubo", "3", "--time", "-1"]) == 1

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--alg", "dcqo"])
        assert exc.value.code == 2


class TestRegimeScan:
    def test_csv(self, tmp_path):
        out = tmp_path / "scan.csv"
        coeffs = tmp_path / "coefficients.csv"
        argv = ["regime-scan", "--random-spin-glass", "3", "--times", "0.1,1",
                "--steps", "4", "-o", str(out), "--coefficients", str(coeffs)]
        assert main(argv) == 0
        rows = read_csv(out)
        assert list(rows[0]) == ["T", "variant", "SP"]
        assert [r["variant"] for r in rows[:3]] == ["anneal", "full", "cd-only"]
        assert len(rows) == 6
        assert len(read_csv(coeffs)) == 8

    def test_oracle(self, capsys):
        argv = ["regime-scan", "--random-spin-glass", "2", "--t-min", "0.01",
                "--t-max", "1", "--points", "3", "--oracle", "--grid", "20"]
        assert main(argv) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1 + 3 * 3


class TestCompare:
    def test_empty_algorithm_list(self, capsys):
        argv = ["compare", "--random-spin-glass", "3", "--algorithms", ""]
        assert main(argv) == 1
        error = json.loads(capsys.readouterr().err.splitlines()[-1])
        assert "algorithm" in error["message"]

    def test_outputs(self, tmp_path):
        prefix = str(tmp_path / "cmp")
        argv = ["compare", "--random-spin-glass", "3", "--seeds", "0-1",
                "--algorithms", "dqa,dcqo", "-o", prefix]
        assert main(argv) == 0
        rows = read_csv(prefix + ".csv")
        assert [(r["seed"], r["algorithm"]) for r in rows] == [
            ("0", "dqa"), ("0", "dcqo"), ("1", "dqa"), ("1", "dcqo")]
        with open(prefix + ".json") as fh:
            assert len(json.load(fh)) == 4

    def test_matched_depth(self, tmp_path):
        prefix = str(tmp_path / "cmp")
        argv = ["compare", "--random-spin-glass", "4", "--seeds", "0",
                "--algorithms", "dqa,dcqo", "-o", prefix]
        assert main(argv) == 0
        dqa, dcqo = read_csv(prefix + ".csv")
        # one fused YZ+ZY block of two CX per pair and step
        assert dcqo["two_qubit_gates"] == "24"
        assert dqa["reference_two_qubit_gates"] == "24"
        assert dqa["steps"] == "2"
        assert dqa["two_qubit_gates"] == "24"

    def test_unmatched_depth(self, tmp_path):
        prefix = str(tmp_path / "cmp")
        argv = ["compare", "--random-spin-glass", "4", "--seeds", "0",
                "--algorithms", "dqa,dcqo", "--no-match-depth", "-o", prefix]
        assert main(argv) == 0
        dqa, _ = read_csv(prefix + ".csv")
        assert dqa["steps"] == "6"
        assert dqa["two_qubit_gates"] == "72"
        assert dqa["reference_two_qubit_gates"] == ""


class TestLns:
    def test_brute(self, capsys):
        argv = ["lns", "--dense-qubo", "12", "--k", "4", "--seed", "2"]
        assert main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["n"] == 12
        assert len(result["assignment"]) == 12
        assert result["trace"][-1] == result["cost"]

    def test_dcqo(self, capsys):
        argv = ["lns", "--dense-qubo", "8", "--k", "4", "--subsolver", "dcqo",
                "--budget", "3"]
        assert main(argv) == 0
        assert json.loads(capsys.readouterr().out)["solves"] <= 3

    def test_k_too_large(self, capsys):
        assert main(["lns", "--dense-qubo", "4", "--k", "5"]) == 1


def test_write_atomic(tmp_path):
    path = tmp_path / "out.txt"
    path.write_text("old")
    write_atomic(str(path), "new")
    assert path.read_text() == "new"
    assert os.listdir(tmp_path) == ["out.txt"]
