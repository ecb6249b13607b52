"""Exact TSP oracles and tour utilities.

A tour is a tuple permutation of range(n) read as a closed cycle. The
canonical form starts at city 0 with the smaller-indexed neighbor in second
place, so each of the (n-1)!/2 distinct cycles has exactly one canonical
tuple. Lengths are summed left to right, one edge at a time; equal tuples on
equal matrices therefore produce bit-identical floats, which the cross-oracle
tests rely on.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import InstanceTooLargeError, InvalidInstanceError, InvalidTourError

__all__ = [
    "Tour",
    "check_tour",
    "canonical_tour",
    "tour_length",
    "brute_force_tsp",
    "held_karp",
    "two_opt_descent",
    "BRUTE_FORCE_MAX",
    "HELD_KARP_MAX",
]

Tour = tuple[int, ...]

BRUTE_FORCE_MAX = 10
HELD_KARP_MAX = 16
# Improvements below this are float noise; ignoring them guarantees the
# 2-opt descent terminates.
EPS_IMPROVE = 1e-12


def check_tour(order, n: int) -> Tour:
    """Validate that `order` is a permutation of range(n); returns it as a tuple."""
    try:
        t = tuple(int(c) for c in order)
    except (TypeError, ValueError) as exc:
        raise InvalidTourError(f"not a city sequence: {order!r}") from exc
    if len(t) != n or sorted(t) != list(range(n)):
        raise InvalidTourError(f"not a permutation of 0..{n - 1}: {order!r}")
    return t


def canonical_tour(order) -> Tour:
    """Rotate to start at city 0, then reverse if needed so order[1] < order[-1]."""
    raw = tuple(order)
    t = check_tour(raw, len(raw))
    i = t.index(0)
    t = t[i:] + t[:i]
    if len(t) > 2 and t[1] > t[-1]:
        t = (0,) + tuple(reversed(t[1:]))
    return t


def tour_length(d: np.ndarray, order) -> float:
    """Closed-cycle length, accumulated left to right."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise InvalidTourError("distance matrix must be square")
    t = check_tour(order, n)
    total = 0.0
    for k in range(n):
        total += float(d[t[k], t[(k + 1) % n]])
    return total


def brute_force_tsp(d: np.ndarray) -> tuple[Tour, float]:
    """Enumerate all (n-1)!/2 direction-normalized tours fixing city 0 first.

    Ties go to the lexicographically smallest canonical order, which is the
    first one enumerated.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n < 3:
        raise InvalidInstanceError(f"need n >= 3, got {n}")
    if n > BRUTE_FORCE_MAX:
        raise InstanceTooLargeError(
            f"brute force is capped at n={BRUTE_FORCE_MAX}, got {n}"
        )
    dl = d.tolist()
    row0 = dl[0]
    best_perm = None
    best_len = math.inf
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue  # the reversed direction of a cycle already enumerated
        length = row0[perm[0]]
        prev = perm[0]
        for city in perm[1:]:
            length += dl[prev][city]
            prev = city
        length += dl[prev][0]
        if length < best_len:
            best_len = length
            best_perm = perm
    tour = (0,) + best_perm
    return tour, tour_length(d, tour)


def held_karp(d: np.ndarray) -> tuple[Tour, float]:
    """Dynamic programming over city subsets, O(n^2 * 2^n).

    dp[mask, j] is the cheapest path from city 0 through exactly the cities
    of `mask` (bit j-1 stands for city j), ending at city j+1. Ties take the
    lowest-indexed predecessor at every cell and the lowest-indexed final
    city, so the backtrack is deterministic.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n < 3:
        raise InvalidInstanceError(f"need n >= 3, got {n}")
    if n > HELD_KARP_MAX:
        raise InstanceTooLargeError(f"held_karp is capped at n={HELD_KARP_MAX}, got {n}")
    m = n - 1
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int8)
    for j in range(m):
        dp[1 << j, j] = d[0, j + 1]
    sub = d[1:, 1:]
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue  # singletons are the base case
        for j in range(m):
            if not mask >> j & 1:
                continue
            pmask = mask ^ (1 << j)
            cand = dp[pmask] + sub[:, j]  # unset bits stay at inf
            k = int(np.argmin(cand))
            dp[mask, j] = cand[k]
            parent[mask, j] = k
    closing = dp[size - 1] + d[1:, 0]
    j = int(np.argmin(closing))
    mask = size - 1
    chain = []
    while j >= 0:
        chain.append(j + 1)
        j, mask = int(parent[mask, j]), mask ^ (1 << j)
    order = [0] + chain[::-1]
    tour = canonical_tour(order)
    return tour, tour_length(d, tour)


def two_opt_descent(d: np.ndarray, start) -> Tour:
    """First-improving 2-opt descent; rescans from the top after every move."""
    tour, _ = _two_opt_with_stats(d, start)
    return tour


def _two_opt_with_stats(d: np.ndarray, start) -> tuple[Tour, int]:
    """Descent plus the number of move deltas evaluated (for run records)."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    t = list(check_tour(start, n))
    dl = d.tolist()
    evals = 0
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            a, b = t[i - 1], t[i]
            row_a, row_b = dl[a], dl[b]
            for j in range(i + 1, n):
                if i == 1 and j == n - 1:
                    continue  # whole-tail reversal only flips direction
                c = t[j]
                e = t[j + 1] if j + 1 < n else t[0]
                evals += 1
                delta = row_a[c] + row_b[e] - row_a[b] - dl[c][e]
                if delta < -EPS_IMPROVE:
                    t[i : j + 1] = t[i : j + 1][::-1]
                    improved = True
                    break
            if improved:
                break
    return tuple(t), evals
