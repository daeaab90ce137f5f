"""Tests for the compression and lowering passes"""

import math

import numpy as np
import pytest

from dcqo.builders import (
    AnsatzSpec,
    build_dcqo_circuit,
    build_dqa_circuit,
    build_hdcqo_circuit,
    build_qaoa_circuit,
)
from dcqo.circuit import TWO_QUBIT_ROTATIONS as KINDS
from dcqo.circuit import Circuit, Gate
from dcqo.exceptions import InvalidConfig, UnlowerableGate
from dcqo.ising import brute_force_solve, qubo_to_ising
from dcqo.passes import (
    apply_gate_cutoff,
    count_gates,
    lower_to_cx,
    lower_to_ms,
)
from dcqo.problems import dense_qubo_instance
from dcqo.simulator import unitary
from dcqo.variational import evaluate_circuit


def assert_equivalent(a, b):
    """Unitaries of *a* and *b* agree up to a global phase."""
    ua, ub = unitary(a), unitary(b)
    overlap = abs(np.trace(ua.conj().T @ ub))
    assert overlap == pytest.approx(ua.shape[0], rel=1e-9)


@pytest.fixture(scope="module")
def dense16():
    return qubo_to_ising(dense_qubo_instance(16, seed=0))


def random_rotation_circuit(seed, width=3, size=12):
    rng = np.random.default_rng(seed)
    kinds = ["RX", "RY", "RZ", "RZZ", "RYZ", "RZY", "RYY"]
    gates = [Gate("H", (q,)) for q in range(width)]
    for _ in range(size):
        kind = kinds[rng.integers(len(kinds))]
        angle = rng.uniform(-2 * math.pi, 2 * math.pi)
        if kind in ("RX", "RY", "RZ"):
            gates.append(Gate(kind, (int(rng.integers(width)),), (angle,)))
        else:
            a, b = rng.choice(width, size=2, replace=False)
            gates.append(Gate(kind, (int(a), int(b)), (angle,)))
    return Circuit(width, gates)


class TestCxLowering:
    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("fuse", [True, False])
    def test_random_equivalence(self, seed, fuse):
        circuit = random_rotation_circuit(seed)
        assert_equivalent(lower_to_cx(circuit, fuse=fuse), circuit)

    @pytest.mark.parametrize("first", ["RYZ", "RZY"])
    def test_fused_block(self, first):
        second = "RZY" if first == "RYZ" else "RYZ"
        circuit = Circuit(
            2, [Gate(first, (0, 1), (0.37,)), Gate(second, (0, 1), (-1.9,))]
        )
        lowered = lower_to_cx(circuit)
        assert lowered.two_qubit_count() == 2
        assert lowered.metadata["fused_blocks"] == 1
        assert_equivalent(lowered, circuit)

    def test_reversed_pair_is_not_fused(self):
        circuit = Circuit(
            2, [Gate("RYZ", (0, 1), (0.37,)), Gate("RZY", (1, 0), (0.5,))]
        )
        lowered = lower_to_cx(circuit)
        assert lowered.two_qubit_count() == 4
        assert_equivalent(lowered, circuit)

    def test_native_gates_rejected(self):
        with pytest.raises(UnlowerableGate):
            lower_to_cx(Circuit(2, [Gate("MS", (0, 1), (0, 0, 0.1))]))


class TestMsLowering:
    @pytest.mark.parametrize("kind", ["RZZ", "RYZ", "RZY", "RYY"])
    @pytest.mark.parametrize("theta", [0.3, 2.0, 3.5, 5.5, -0.4, math.pi / 2])
    def test_equivalence(self, kind, theta):
        circuit = Circuit(
            3, [Gate("H", (0,)), Gate("RX", (1,), (0.2,)),
                Gate(kind, (2, 0), (theta,))]
        )
        lowered = lower_to_ms(circuit)
        counts = count_gates(lowered)
        assert counts["MS"] == 1
        assert counts["two_qubit"] == 1
        assert_equivalent(lowered, circuit)

    def test_dressing(self):
        lowered = lower_to_ms(Circuit(2, [Gate("RZY", (0, 1), (0.25,))]))
        kinds = [g.kind for g in lowered]
        assert kinds == ["GPI2", "MS", "GPI2"]
        assert lowered.gates[0].params == (math.pi,)
        assert lowered.gates[-1].params == (0.0,)

    def test_ms_angle_range(self):
        for theta in np.linspace(0, 2 * math.pi, 17):
            lowered = lower_to_ms(Circuit(2, [Gate("RYY", (0, 1), (theta,))]))
            ms = [g for g in lowered if g.kind == "MS"][0]
            assert -1e-12 <= ms.angle <= math.pi / 2 + 1e-12

    def test_cx_rejected(self):
        with pytest.raises(UnlowerableGate):
            lower_to_ms(Circuit(2, [Gate("CX", (0, 1))]))


class TestRandomLowering:
    CASES = 100

    def random_cases(self, kind, seed):
        rng = np.random.default_rng(seed)
        for theta in rng.uniform(-4 * math.pi, 4 * math.pi, size=self.CASES):
            qubits = tuple(rng.permutation(3)[:2].tolist())
            prefix = [Gate("RX", (q,), (a,)) for q, a in
                      zip(range(3), rng.uniform(-math.pi, math.pi, size=3))]
            yield theta, Circuit(3, prefix + [Gate(kind, qubits, (theta,))])

    @pytest.mark.parametrize("kind", KINDS)
    def test_ms(self, kind):
        quadrants = set()
        for theta, circuit in self.random_cases(kind, seed=KINDS.index(kind)):
            quadrants.add(int((theta % (2 * math.pi)) // (math.pi / 2)))
            assert_equivalent(lower_to_ms(circuit), circuit)
        assert quadrants == {0, 1, 2, 3}

    @pytest.mark.parametrize("kind", KINDS)
    def test_cx(self, kind):
        for _, circuit in self.random_cases(kind, seed=10 + KINDS.index(kind)):
            lowered = lower_to_cx(circuit)
            assert lowered.two_qubit_count() == 2
            assert_equivalent(lowered, circuit)

    def test_fused_pairs(self):
        rng = np.random.default_rng(5)
        for a, b in rng.uniform(-4 * math.pi, 4 * math.pi, size=(self.CASES, 2)):
            circuit = Circuit(
                2, [Gate("H", (0,)), Gate("RYZ", (0, 1), (a,)),
                    Gate("RZY", (0, 1), (b,))]
            )
            lowered = lower_to_cx(circuit)
            assert lowered.two_qubit_count() == 2
            assert_equivalent(lowered, circuit)


class TestGateCutoff:
    def test_zero_threshold_keeps_everything(self, pair_model):
        circuit = build_dcqo_circuit(pair_model, 3)
        assert apply_gate_cutoff(circuit, 0.0) == circuit

    def test_infinite_threshold(self, pair_model):
        circuit = build_dcqo_circuit(pair_model, 3)
        cut = apply_gate_cutoff(circuit, math.inf)
        assert [g.kind for g in cut] == ["H", "H"]
        stats = cut.metadata["cutoff"]
        assert stats["kept_one_qubit"] == stats["kept_two_qubit"] == 0
        assert stats["removed_two_qubit"] == 6

    def test_folded_angle(self):
        circuit = Circuit(1, [Gate("RX", (0,), (2 * math.pi + 0.01,))])
        assert len(apply_gate_cutoff(circuit, 0.1)) == 0

    def test_negative_threshold(self, pair_model):
        with pytest.raises(InvalidConfig):
            apply_gate_cutoff(build_dcqo_circuit(pair_model, 2), -0.1)

    def test_three_city_dcqo(self, tsp3_model):
        circuit = apply_gate_cutoff(build_dcqo_circuit(tsp3_model, 2), 0.1)
        assert lower_to_cx(circuit).two_qubit_count() == 36

    def test_four_city_ms_count(self, tsp4_model):
        spec = AnsatzSpec("y-zy-only", layers=1)
        # penalty couplings give angles of 0.5, distance couplings at most 0.0625
        params = [0.0] * tsp4_model.n + [0.25]
        circuit = build_hdcqo_circuit(tsp4_model, spec, params)
        ms = count_gates(lower_to_ms(apply_gate_cutoff(circuit, 0.1)))
        assert ms["MS"] == 48

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_dense_sixteen_qubits(self, seed):
        model = qubo_to_ising(dense_qubo_instance(16, seed=seed))
        ground = brute_force_solve(model)
        circuit = apply_gate_cutoff(build_dcqo_circuit(model, 2), 0.1)
        stats = circuit.metadata["cutoff"]
        removed = stats["removed_two_qubit"]
        assert removed >= 0.6 * (removed + stats["kept_two_qubit"])
        sp = evaluate_circuit(model, circuit, ground=ground).success_probability
        assert sp >= 4 * ground.degeneracy / 2**16


class TestTwoQubitCounts:
    def test_dqa(self, dense16):
        circuit = build_dqa_circuit(dense16, 1.0, 6)
        assert lower_to_cx(circuit).two_qubit_count() == 1440

    def test_qaoa(self, dense16):
        circuit = build_qaoa_circuit(dense16, 1, [0.3, 0.2])
        assert lower_to_cx(circuit).two_qubit_count() == 240

    def test_hdcqo(self, dense16):
        spec = AnsatzSpec("two-param", layers=1)
        circuit = build_hdcqo_circuit(dense16, spec, [0.3, 0.2])
        assert lower_to_cx(circuit).two_qubit_count() == 240
        assert lower_to_ms(circuit).two_qubit_count() == 240

    def test_dcqo_fusion_halves(self, dense16):
        circuit = build_dcqo_circuit(dense16, 2)
        fused = lower_to_cx(circuit).two_qubit_count()
        unfused = lower_to_cx(circuit, fuse=False).two_qubit_count()
        assert fused == 480
        assert unfused == 2 * fused


class TestCountGates:
    def test_counts(self):
        circuit = Circuit(
            2, [Gate("H", (0,)), Gate("H", (1,)), Gate("CX", (0, 1))]
        )
        counts = count_gates(circuit)
        assert counts["H"] == 2
        assert counts["CX"] == 1
        assert counts["MS"] == 0
        assert counts["two_qubit"] == 1
        assert counts["total"] == 3
