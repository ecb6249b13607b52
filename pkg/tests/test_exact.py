"""Exact oracles: tour handling, brute force, Held-Karp, 2-opt descent.

Brute force and Held-Karp are implemented independently of each other; their
exact agreement on every random instance is the anchor for all ratio math
elsewhere.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from routelab import (
    InstanceTooLargeError,
    InvalidTourError,
    brute_force_tsp,
    canonical_tour,
    check_tour,
    distance_matrix,
    gen_uniform,
    held_karp,
    tour_length,
    two_opt_descent,
)
from routelab.exact import BRUTE_FORCE_MAX, HELD_KARP_MAX


class TestCheckTour:
    def test_valid_tour_passes(self):
        assert check_tour((2, 0, 1, 3), 4) == (2, 0, 1, 3)

    def test_wrong_length(self):
        with pytest.raises(InvalidTourError):
            check_tour((0, 1, 2), 4)

    def test_duplicate_city(self):
        with pytest.raises(InvalidTourError):
            check_tour((0, 1, 1, 3), 4)

    def test_out_of_range(self):
        with pytest.raises(InvalidTourError):
            check_tour((0, 1, 2, 4), 4)

    def test_negative_city(self):
        with pytest.raises(InvalidTourError):
            check_tour((0, 1, 2, -1), 4)


class TestCanonicalTour:
    def test_starts_at_zero(self):
        assert canonical_tour((3, 2, 0, 1))[0] == 0

    def test_direction_normalized(self):
        t = canonical_tour((0, 3, 2, 1))
        assert t == (0, 1, 2, 3)

    def test_all_symmetries_collapse(self):
        base = (0, 2, 4, 1, 3)
        variants = set()
        lst = list(base)
        for shift in range(5):
            rot = lst[shift:] + lst[:shift]
            variants.add(canonical_tour(rot))
            variants.add(canonical_tour(tuple(reversed(rot))))
        assert variants == {canonical_tour(base)}

    def test_accepts_generator_input(self):
        assert canonical_tour(iter((1, 0, 2))) == (0, 1, 2)

    @given(st.permutations(list(range(6))))
    def test_property_canonical_is_idempotent(self, perm):
        c = canonical_tour(tuple(perm))
        assert canonical_tour(c) == c
        assert c[0] == 0
        if len(c) > 2:
            assert c[1] <= c[-1]


class TestTourLength:
    def test_unit_square_perimeter(self, unit_square_d):
        assert tour_length(unit_square_d, (0, 1, 2, 3)) == 4.0

    def test_unit_square_crossing(self, unit_square_d):
        crossing = tour_length(unit_square_d, (0, 2, 1, 3))
        assert math.isclose(crossing, 2.0 + 2.0 * math.sqrt(2.0), rel_tol=1e-12)

    def test_triangle(self, triangle_345_d):
        assert tour_length(triangle_345_d, (0, 1, 2)) == 12.0

    def test_rotation_invariant_exactly_for_same_direction(self, triangle_345_d):
        # n=3: every cyclic order visits the same three edges
        assert tour_length(triangle_345_d, (1, 2, 0)) == tour_length(
            triangle_345_d, (0, 1, 2)
        )

    def test_rejects_invalid_tour(self, unit_square_d):
        with pytest.raises(InvalidTourError):
            tour_length(unit_square_d, (0, 1, 2))


class TestBruteForce:
    def test_unit_square(self, unit_square_d):
        tour, length = brute_force_tsp(unit_square_d)
        assert tour == (0, 1, 2, 3)
        assert length == 4.0

    def test_triangle_single_tour(self, triangle_345_d):
        tour, length = brute_force_tsp(triangle_345_d)
        assert tour == (0, 1, 2) and length == 12.0

    def test_tie_break_is_lexicographic(self):
        # constant distances: every tour ties, the lex-first canonical wins
        d = np.ones((5, 5)) - np.eye(5)
        tour, length = brute_force_tsp(d)
        assert tour == (0, 1, 2, 3, 4)
        assert length == 5.0

    def test_size_cap(self):
        d = distance_matrix(gen_uniform(BRUTE_FORCE_MAX + 1, seed=0))
        with pytest.raises(InstanceTooLargeError):
            brute_force_tsp(d)

    def test_returns_canonical_tour(self):
        d = distance_matrix(gen_uniform(6, seed=9))
        tour, _ = brute_force_tsp(d)
        assert canonical_tour(tour) == tour


class TestHeldKarp:
    def test_unit_square(self, unit_square_d):
        tour, length = held_karp(unit_square_d)
        assert tour == (0, 1, 2, 3) and length == 4.0

    def test_matches_brute_force_exactly(self):
        for n in range(3, 9):
            d = distance_matrix(gen_uniform(n, seed=100 + n))
            bt, bl = brute_force_tsp(d)
            ht, hl = held_karp(d)
            assert hl == bl  # same canonical tour recomputed by the same sum
            assert ht == bt

    def test_deterministic_under_ties(self):
        d = np.ones((6, 6)) - np.eye(6)
        first = held_karp(d)
        second = held_karp(d)
        assert first == second
        assert first[1] == 6.0

    def test_size_cap(self):
        d = distance_matrix(gen_uniform(HELD_KARP_MAX + 1, seed=0))
        with pytest.raises(InstanceTooLargeError):
            held_karp(d)

    def test_moderate_size_runs(self):
        d = distance_matrix(gen_uniform(12, seed=1))
        tour, length = held_karp(d)
        assert len(tour) == 12 and length > 0

    @settings(max_examples=20)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=3, max_value=7))
    def test_property_agrees_with_brute_force(self, seed, n):
        d = distance_matrix(gen_uniform(n, seed=seed))
        assert held_karp(d)[1] == brute_force_tsp(d)[1]


class TestTwoOpt:
    def test_fixes_a_crossing(self, unit_square_d):
        tour = two_opt_descent(unit_square_d, (0, 2, 1, 3))
        assert tour_length(unit_square_d, tour) == 4.0

    def test_never_worsens(self):
        d = distance_matrix(gen_uniform(9, seed=7))
        start = tuple(np.random.default_rng(0).permutation(9).tolist())
        out = two_opt_descent(d, start)
        assert tour_length(d, out) <= tour_length(d, start)

    def test_optimal_start_is_fixed_point(self):
        d = distance_matrix(gen_uniform(7, seed=2))
        opt_tour, opt_len = held_karp(d)
        out = two_opt_descent(d, opt_tour)
        assert tour_length(d, out) == opt_len

    def test_deterministic(self):
        d = distance_matrix(gen_uniform(10, seed=3))
        start = tuple(range(10))
        assert two_opt_descent(d, start) == two_opt_descent(d, start)

    @settings(max_examples=25)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_property_above_optimum(self, seed):
        d = distance_matrix(gen_uniform(6, seed=seed))
        _, opt = held_karp(d)
        out = two_opt_descent(d, tuple(range(6)))
        assert tour_length(d, out) >= opt - 1e-9
