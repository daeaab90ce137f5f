"""Tests for the TSP encoding and the large neighbourhood search"""

import itertools
import json

import numpy as np
import pytest

from dcqo.builders import AnsatzSpec
from dcqo.exceptions import InvalidConfig, InvalidProblem, LengthMismatch
from dcqo.ising import QuboProblem, brute_force_solve, qubo_to_ising
from dcqo.problems import (
    Path,
    TspInstance,
    brute_force_subsolver,
    clamp_qubo,
    dcqo_subsolver,
    decode_tsp,
    decompose_qubo,
    dense_qubo_instance,
    encode_path,
    greedy_descent,
    hdcqo_subsolver,
    lns_solve,
    tsp_to_qubo,
    variable_subsets,
)
from dcqo.variational import OptimizerConfig


def block_qubo(blocks, seed):
    """Random QUBO that only couples variables inside the same block."""
    rng = np.random.default_rng(seed)
    n = sum(len(b) for b in blocks)
    Q = np.zeros((n, n))
    for block in blocks:
        for i in block:
            for j in block:
                if i <= j:
                    Q[i, j] = Q[j, i] = rng.uniform(-1, 1)
    return QuboProblem(Q)


class TestTspInstance:
    def test_data_files(self, tsp3, tsp4):
        assert tsp3.names == ["A", "B", "C"]
        assert tsp3.penalty == pytest.approx(0.75)
        assert tsp4.penalty == pytest.approx(2.0)
        assert tsp4.num_qubits == 16

    def test_coordinates(self):
        inst = TspInstance.from_coordinates([[0, 0], [3, 0], [3, 4]])
        assert inst.d[0, 2] == pytest.approx(5.0)
        assert inst.tour_length([0, 1, 2]) == pytest.approx(12.0)

    def test_uniform(self):
        inst = TspInstance.uniform(3, 0.25)
        assert inst.tour_length(Path([2, 0, 1])) == pytest.approx(0.75)

    @pytest.mark.parametrize(
        "d",
        [
            [[0, 1], [2, 0]],
            [[1, 1], [1, 0]],
            [[0, -1], [-1, 0]],
            [[0]],
            [[0, 1, 2]],
        ],
    )
    def test_invalid(self, d):
        with pytest.raises(InvalidProblem):
            TspInstance(d)

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InvalidProblem):
            TspInstance.from_json(path)
        path.write_text(json.dumps({"cities": ["a", "b"]}))
        with pytest.raises(InvalidProblem):
            TspInstance.from_json(path)


class TestTspEncoding:
    def test_decode(self):
        path = decode_tsp("1000 0010 0100 0001", 4)
        assert path.feasible
        assert path.cities == (0, 2, 1, 3)
        assert encode_path(path) == "1000001001000001"

    def test_decode_with_length(self, tsp4):
        path = decode_tsp(encode_path([0, 1, 2, 3]), tsp4)
        assert path.length == pytest.approx(1.0)

    def test_infeasible(self):
        tour = decode_tsp("1100 0000 0010 0001", 4)
        assert not tour.feasible
        assert tour.rows == [0, 1]
        assert tour.columns == []
        assert "time steps" in tour.reason

    def test_wrong_width(self):
        with pytest.raises(LengthMismatch):
            decode_tsp("1000", 3)

    def test_feasible_cost_is_tour_length(self, tsp4):
        q = tsp_to_qubo(tsp4)
        for cities in itertools.permutations(range(4)):
            assert q.evaluate(encode_path(cities)) == pytest.approx(
                tsp4.tour_length(cities)
            )

    def test_three_city_structure(self, tsp3_model):
        assert tsp3_model.n == 9
        assert len(tsp3_model.J) == 36

    def test_three_city_ground_states(self, tsp3_model):
        ground = brute_force_solve(tsp3_model)
        assert ground.degeneracy == 6
        assert ground.energy == pytest.approx(0.75)
        paths = [decode_tsp(b, 3) for b in ground.bitstrings]
        assert all(p.feasible for p in paths)
        assert len({p.cities for p in paths}) == 6

    def test_four_city_ground_states(self, tsp4, tsp4_model):
        ground = brute_force_solve(tsp4_model)
        assert ground.degeneracy == 8
        assert ground.energy == pytest.approx(1.0)
        for bits in ground.bitstrings:
            path = decode_tsp(bits, tsp4)
            assert path.feasible
            assert path.length == pytest.approx(1.0)


class TestDenseInstance:
    def test_fully_connected(self):
        q = dense_qubo_instance(16, seed=0)
        assert np.count_nonzero(q.Q) == 256
        assert len(qubo_to_ising(q).J) == 120

    def test_seeded(self):
        assert np.array_equal(
            dense_qubo_instance(5, seed=2).Q, dense_qubo_instance(5, seed=2).Q
        )


class TestDecomposition:
    def test_clamp_identity(self):
        q = dense_qubo_instance(8, seed=4)
        rng = np.random.default_rng(0)
        assignment = rng.integers(0, 2, size=8)
        sub = clamp_qubo(q, [1, 4, 6], assignment)
        for y in itertools.product([0, 1], repeat=3):
            assert sub.problem.evaluate(list(y)) == pytest.approx(
                q.evaluate(sub.merge(list(y)))
            )

    def test_greedy_finds_blocks(self):
        blocks = [[0, 3, 6, 9], [1, 4, 7, 10], [2, 5, 8, 11]]
        subsets = variable_subsets(block_qubo(blocks, seed=1), 4)
        assert sorted(subsets) == blocks

    @pytest.mark.parametrize("strategy", ["greedy", "sequential", "random"])
    def test_cover(self, strategy):
        q = dense_qubo_instance(10, seed=1)
        subsets = variable_subsets(q, 4, strategy, seed=3)
        assert all(len(s) == 4 for s in subsets)
        assert set().union(*map(set, subsets)) == set(range(10))

    def test_sequential_tail(self):
        q = dense_qubo_instance(10, seed=1)
        subsets = variable_subsets(q, 4, "sequential")
        assert subsets == [[0, 1, 2, 3], [4, 5, 6, 7], [6, 7, 8, 9]]

    def test_whole_problem(self):
        q = dense_qubo_instance(5, seed=1)
        assert variable_subsets(q, 5) == [[0, 1, 2, 3, 4]]

    @pytest.mark.parametrize(
        "k, strategy", [(0, "greedy"), (6, "greedy"), (2, "spectral")]
    )
    def test_invalid(self, k, strategy):
        with pytest.raises(InvalidConfig):
            variable_subsets(dense_qubo_instance(5, seed=1), k, strategy)

    def test_decompose_defaults_to_zeros(self):
        subs = decompose_qubo(dense_qubo_instance(6, seed=2), 3)
        for sub in subs:
            assert not sub.assignment.any()


class TestGreedyDescent:
    def test_local_minimum(self):
        q = dense_qubo_instance(12, seed=5)
        x = greedy_descent(q)
        cost = q.evaluate(x)
        for i in range(q.n):
            flipped = x.copy()
            flipped[i] ^= 1
            assert q.evaluate(flipped) >= cost - 1e-12


class TestLns:
    def test_separable_optimum(self):
        blocks = [list(range(b, 24, 3)) for b in range(3)]
        q = block_qubo(blocks, seed=8)
        optimum = 0.0
        for block in blocks:
            sub = clamp_qubo(q, block, np.zeros(24))
            optimum += brute_force_solve(qubo_to_ising(sub.problem)).energy
        result = lns_solve(q, 8, seed=0)
        assert result.cost == pytest.approx(optimum)
        assert result.trace[-1] == result.cost
        assert all(b <= a for a, b in zip(result.trace, result.trace[1:]))

    def test_zero_budget(self):
        q = dense_qubo_instance(10, seed=3)
        result = lns_solve(q, 4, budget=0)
        assert result.solves == 0
        assert result.trace == [q.evaluate(greedy_descent(q))]

    def test_budget_is_respected(self):
        q = dense_qubo_instance(12, seed=3)
        result = lns_solve(q, 4, budget=2, initial=np.zeros(12))
        assert result.solves <= 2
        assert len(result.trace) == result.solves + 1

    def test_negative_budget(self):
        with pytest.raises(InvalidConfig):
            lns_solve(dense_qubo_instance(4, seed=3), 2, budget=-1)

    def test_result_dict(self):
        result = lns_solve(dense_qubo_instance(6, seed=3), 3)
        data = result.as_dict()
        assert len(data["assignment"]) == 6
        assert set(data) == {"assignment", "cost", "trace", "solves", "sweeps"}


class TestQuantumSubsolvers:
    def test_dcqo_subsolver(self):
        q = dense_qubo_instance(5, seed=6)
        bits = dcqo_subsolver()(q)
        assert bits.shape == (5,)
        assert set(bits.tolist()) <= {0, 1}

    def test_degenerate_subproblem(self):
        bits = dcqo_subsolver()(QuboProblem(np.zeros((3, 3)), offset=1.0))
        assert bits.tolist() == [0, 0, 0]

    def test_lns_never_worse_than_start(self):
        q = dense_qubo_instance(12, seed=2)
        start = np.zeros(12)
        result = lns_solve(q, 4, subsolver=dcqo_subsolver(), initial=start)
        assert result.cost <= q.evaluate(start)

    @pytest.mark.slow
    def test_hdcqo_subsolver(self):
        q = dense_qubo_instance(10, seed=2)
        solver = hdcqo_subsolver(
            AnsatzSpec("two-param", layers=1), OptimizerConfig(max_iterations=30)
        )
        result = lns_solve(q, 5, subsolver=solver, budget=4)
        assert result.solves <= 4
        assert result.cost <= result.trace[0]
