"""QUBO encoding of tours: penalty Hamiltonian, decode, ground states.

The key check is an independent oracle: `direct_hamiltonian` evaluates the
one-hot penalty form straight from its definition with plain loops, never
touching the expanded (offset, linear, Q) coefficients. Agreement on random
bitstrings pins the whole encoding.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from routelab import (
    Infeasible,
    InstanceTooLargeError,
    InvalidParameterError,
    Penalties,
    canonical_tour,
    decode,
    default_penalties,
    distance_matrix,
    encode_tour,
    encode_tsp,
    energy_table,
    enumerate_ground_states,
    gen_uniform,
    held_karp,
    qubo_energy,
    qubo_to_json,
    tour_length,
)
from routelab.qubo import GROUND_ENUM_MAX, bits_of, index_of_bits


def assignment_matrix(qp, x):
    """Full n x n one-hot matrix for a bitstring, reinserting the fixed
    city-0/slot-0 assignment of the reduced form."""
    n = qp.n_cities
    assign = np.zeros((n, n), dtype=int)
    if qp.reduced:
        assign[0, 0] = 1
        assign[1:, 1:] = np.asarray(x, dtype=int).reshape(n - 1, n - 1)
    else:
        assign = np.asarray(x, dtype=int).reshape(n, n)
    return assign


def direct_hamiltonian(d, assign, pen):
    """The penalty Hamiltonian evaluated from its definition, term by term."""
    n = d.shape[0]
    e = 0.0
    for i in range(n):
        e += pen.a * (1.0 - assign[i, :].sum()) ** 2
    for t in range(n):
        e += pen.b * (1.0 - assign[:, t].sum()) ** 2
    for t in range(n):
        for i in range(n):
            for j in range(n):
                if i != j:
                    e += pen.c * d[i, j] * assign[i, t] * assign[j, (t + 1) % n]
    return e


class TestPenalties:
    def test_rejects_nonpositive(self):
        for bad in ((0, 1, 1), (1, -2, 1), (1, 1, 0)):
            with pytest.raises(InvalidParameterError):
                Penalties(*bad)

    def test_default_penalties_dominate(self):
        d = distance_matrix(gen_uniform(5, seed=0))
        pen = default_penalties(d)
        assert pen.a == pen.b == 2.0 * float(d.max())
        assert pen.c == 1.0
        assert pen.dominates(float(d.max()))

    def test_weak_penalties_flagged(self):
        d = distance_matrix(gen_uniform(5, seed=0))
        weak = Penalties(a=1e-6, b=1e-6, c=1.0)
        assert not weak.dominates(float(d.max()))
        qp = encode_tsp(d, penalties=weak)
        assert not qp.penalties_dominate

    def test_distance_scale_passthrough(self):
        d = distance_matrix(gen_uniform(4, seed=1))
        pen = default_penalties(d, c=3.0)
        assert pen.c == 3.0 and pen.a == 6.0 * float(d.max())


class TestEncodeAgainstDirectOracle:
    def test_random_bitstrings_reduced(self):
        rng = np.random.default_rng(7)
        for n in (3, 4, 5):
            d = distance_matrix(gen_uniform(n, seed=n))
            qp = encode_tsp(d)
            for _ in range(40):
                x = rng.integers(0, 2, qp.n_vars)
                expected = direct_hamiltonian(d, assignment_matrix(qp, x), qp.penalties)
                assert math.isclose(qubo_energy(qp, x), expected, rel_tol=1e-9, abs_tol=1e-9)

    def test_random_bitstrings_unreduced(self):
        rng = np.random.default_rng(8)
        for n in (3, 4):
            d = distance_matrix(gen_uniform(n, seed=10 + n))
            qp = encode_tsp(d, reduced=False)
            assert qp.n_vars == n * n
            for _ in range(40):
                x = rng.integers(0, 2, qp.n_vars)
                expected = direct_hamiltonian(d, assignment_matrix(qp, x), qp.penalties)
                assert math.isclose(qubo_energy(qp, x), expected, rel_tol=1e-9, abs_tol=1e-9)

    def test_feasible_energy_is_c_times_length(self):
        for n in (3, 4, 5, 6):
            d = distance_matrix(gen_uniform(n, seed=20 + n))
            qp = encode_tsp(d, penalties=Penalties(a=50.0, b=70.0, c=2.5))
            rng = np.random.default_rng(n)
            tour = tuple(int(c) for c in rng.permutation(n))
            x = encode_tour(qp, tour)
            assert math.isclose(
                qubo_energy(qp, x), 2.5 * tour_length(d, tour), rel_tol=1e-9
            )

    def test_custom_pen_weights_reach_all_terms(self):
        d = distance_matrix(gen_uniform(4, seed=3))
        pen = Penalties(a=11.0, b=23.0, c=0.5)
        qp = encode_tsp(d, penalties=pen)
        x = np.zeros(qp.n_vars, dtype=int)  # empty assignment: pure penalty
        expected = direct_hamiltonian(d, assignment_matrix(qp, x), pen)
        assert math.isclose(qubo_energy(qp, x), expected, rel_tol=1e-12)


class TestQuboStructure:
    def test_reduced_var_count_and_indexing(self):
        d = distance_matrix(gen_uniform(5, seed=0))
        qp = encode_tsp(d)
        assert qp.n_vars == 16
        assert qp.var_of(1, 1) == 0
        assert qp.var_of(4, 4) == 15
        assert qp.city_slot(0) == (1, 1)
        assert qp.city_slot(15) == (4, 4)
        for k in range(qp.n_vars):
            assert qp.var_of(*qp.city_slot(k)) == k

    def test_reduced_fixed_cells_have_no_variable(self):
        qp = encode_tsp(distance_matrix(gen_uniform(4, seed=0)))
        with pytest.raises(InvalidParameterError):
            qp.var_of(0, 2)
        with pytest.raises(InvalidParameterError):
            qp.var_of(2, 0)

    def test_q_symmetric_zero_diagonal(self):
        qp = encode_tsp(distance_matrix(gen_uniform(5, seed=2)))
        assert np.array_equal(qp.q, qp.q.T)
        assert np.all(np.diag(qp.q) == 0.0)

    def test_bits_validation(self):
        qp = encode_tsp(distance_matrix(gen_uniform(4, seed=0)))
        with pytest.raises(InvalidParameterError):
            qubo_energy(qp, np.zeros(5))
        with pytest.raises(InvalidParameterError):
            qubo_energy(qp, np.full(qp.n_vars, 2))


class TestDecodeEncode:
    def test_round_trip_all_tours_n4(self):
        d = distance_matrix(gen_uniform(4, seed=4))
        qp = encode_tsp(d)
        import itertools

        for perm in itertools.permutations(range(4)):
            x = encode_tour(qp, perm)
            back = decode(qp, x)
            assert not isinstance(back, Infeasible)
            assert canonical_tour(back) == canonical_tour(perm)

    def test_decode_counts_violations(self):
        d = distance_matrix(gen_uniform(4, seed=5))
        qp = encode_tsp(d)
        out = decode(qp, np.zeros(qp.n_vars, dtype=int))
        assert isinstance(out, Infeasible)
        # all-zero bits: rows 1..3 empty, cols 1..3 empty
        assert out.violations == 6

    def test_decode_unreduced(self):
        d = distance_matrix(gen_uniform(3, seed=6))
        qp = encode_tsp(d, reduced=False)
        x = encode_tour(qp, (1, 2, 0))
        assert decode(qp, x) == (1, 2, 0)

    @given(st.permutations(list(range(5))))
    def test_property_encode_decode_inverse(self, perm):
        d = distance_matrix(gen_uniform(5, seed=1))
        qp = encode_tsp(d)
        assert canonical_tour(decode(qp, encode_tour(qp, tuple(perm)))) == canonical_tour(
            tuple(perm)
        )


class TestGroundStates:
    def test_ground_energy_matches_exact_optimum(self):
        for n in (3, 4):
            d = distance_matrix(gen_uniform(n, seed=30 + n))
            qp = encode_tsp(d)
            emin, states = enumerate_ground_states(qp)
            _, opt = held_karp(d)
            assert math.isclose(emin, qp.penalties.c * opt, rel_tol=1e-9)
            assert states, "ground set must not be empty"
            for x in states:
                tour = decode(qp, x)
                assert not isinstance(tour, Infeasible)
                assert math.isclose(tour_length(d, tour), opt, rel_tol=1e-9)

    def test_dominance_every_infeasible_above_optimum(self):
        # exhaustive at n=3: 16 bitstrings; the ground set is exactly feasible
        d = distance_matrix(gen_uniform(3, seed=9))
        qp = encode_tsp(d)
        _, opt = held_karp(d)
        for idx in range(2**qp.n_vars):
            x = bits_of(idx, qp.n_vars)
            if isinstance(decode(qp, x), Infeasible):
                assert qubo_energy(qp, x) > qp.penalties.c * opt + 1e-9

    def test_unreduced_ground_set_is_all_rotations(self):
        # n=3 has a single undirected tour: all 3! permutation matrices tie
        d = distance_matrix(gen_uniform(3, seed=12))
        qp = encode_tsp(d, reduced=False)
        emin, states = enumerate_ground_states(qp)
        assert len(states) == 6
        _, opt = held_karp(d)
        assert math.isclose(emin, qp.penalties.c * opt, rel_tol=1e-9)

    def test_enumeration_cap(self):
        d = distance_matrix(gen_uniform(6, seed=0))
        qp = encode_tsp(d)  # 25 variables
        with pytest.raises(InstanceTooLargeError):
            enumerate_ground_states(qp)
        assert qp.n_vars > GROUND_ENUM_MAX


class TestEnergyTable:
    def test_matches_pointwise_energy(self):
        d = distance_matrix(gen_uniform(4, seed=13))
        qp = encode_tsp(d)
        table = energy_table(qp)
        assert table.shape == (2**qp.n_vars,)
        rng = np.random.default_rng(0)
        for idx in rng.integers(0, table.size, 50):
            x = bits_of(int(idx), qp.n_vars)
            assert math.isclose(table[idx], qubo_energy(qp, x), rel_tol=1e-9, abs_tol=1e-9)

    def test_cached_per_problem(self):
        qp = encode_tsp(distance_matrix(gen_uniform(4, seed=13)))
        assert energy_table(qp) is energy_table(qp)

    def test_bits_round_trip(self):
        for idx in (0, 1, 5, 200, 511):
            assert index_of_bits(bits_of(idx, 9)) == idx

    @given(st.integers(min_value=0, max_value=2**12 - 1))
    def test_property_bits_round_trip(self, idx):
        assert index_of_bits(bits_of(idx, 12)) == idx


class TestQuboJson:
    def test_shape_and_energy_reconstruction(self):
        d = distance_matrix(gen_uniform(4, seed=14))
        qp = encode_tsp(d)
        obj = qubo_to_json(qp)
        assert set(obj) == {"n_vars", "offset", "linear", "quad"}
        assert obj["n_vars"] == qp.n_vars
        assert all(i < j for i, j, _ in obj["quad"])

        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.integers(0, 2, qp.n_vars)
            e = obj["offset"] + float(np.dot(obj["linear"], x))
            for i, j, coef in obj["quad"]:
                e += coef * x[i] * x[j]
            assert math.isclose(e, qubo_energy(qp, x), rel_tol=1e-9, abs_tol=1e-9)
