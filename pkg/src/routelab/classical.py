"""Classical baselines: simulated annealing, a genetic algorithm, and 2-opt
refinement of a seed tour.

Both metaheuristics are pure functions of (matrix, config): the config seed
drives a single generator, so identical inputs reproduce runs exactly apart
from the wall-clock field. Final best tours are canonicalized and their
lengths recomputed with tour_length, so records from equivalent runs compare
equal.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, InvalidTourError
from .exact import Tour, _two_opt_with_stats, canonical_tour, check_tour, tour_length
from .graph import validate_distance_matrix
from .rng import make_rng

__all__ = [
    "SaConfig",
    "GaConfig",
    "RunRecord",
    "record_to_json",
    "metropolis_accept",
    "sa_stage_count",
    "simulated_annealing",
    "ordered_crossover",
    "swap_mutation",
    "tournament_select",
    "genetic_algorithm",
    "hybrid_refine",
]


@dataclass(frozen=True)
class RunRecord:
    """One solver run. best_length always equals tour_length(best_tour)."""

    solver: str
    best_tour: Tour
    best_length: float
    duration_s: float
    evals: int
    seed: int


def record_to_json(rec: RunRecord) -> dict:
    return {
        "solver": rec.solver,
        "best_tour": list(rec.best_tour),
        "best_length": rec.best_length,
        "duration_s": rec.duration_s,
        "evals": rec.evals,
        "seed": rec.seed,
    }


@dataclass(frozen=True)
class SaConfig:
    """Exponential cooling from t_initial down to t_final.

    moves_per_temp=None means 100 * n proposals per temperature, chosen at
    run time from the instance size.
    """

    t_initial: float = 1000.0
    t_final: float = 1.0
    cooling_rate: float = 0.995
    moves_per_temp: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.t_initial > self.t_final > 0:
            raise InvalidParameterError("need t_initial > t_final > 0")
        if not 0 < self.cooling_rate < 1:
            raise InvalidParameterError("cooling_rate must be in (0, 1)")
        if self.moves_per_temp is not None and self.moves_per_temp < 1:
            raise InvalidParameterError("moves_per_temp must be >= 1 when set")


def sa_stage_count(cfg: SaConfig) -> int:
    """Number of temperature stages: ceil(ln(t_final/t_initial)/ln(rate))."""
    return max(
        1,
        math.ceil(math.log(cfg.t_final / cfg.t_initial) / math.log(cfg.cooling_rate)),
    )


def metropolis_accept(delta: float, t: float, rng) -> bool:
    """Downhill moves always pass; uphill with probability exp(-delta/t)."""
    if delta <= 0:
        return True
    return rng.random() < math.exp(-delta / t)


def simulated_annealing(d: np.ndarray, cfg: SaConfig | None = None) -> RunRecord:
    """2-opt proposals under the Metropolis rule with exponential cooling.

    Per temperature stage the generator is consumed in blocks: first the
    proposal positions, then the stage's uniform draws. Uphill acceptance is
    tested as delta < -T*ln(u), which is exactly u < exp(-delta/T) but needs
    no exp call per proposal. evals counts one per proposal delta plus the
    initial full evaluation.
    """
    cfg = cfg or SaConfig()
    d = validate_distance_matrix(d)
    n = d.shape[0]
    rng = make_rng(cfg.seed)
    moves = cfg.moves_per_temp if cfg.moves_per_temp is not None else 100 * n
    stages = sa_stage_count(cfg)
    dl = d.tolist()

    cur = [int(c) for c in rng.permutation(n)]
    cur_len = tour_length(d, cur)
    best = cur[:]
    best_len = cur_len

    t0 = time.perf_counter()
    t = cfg.t_initial
    for _ in range(stages):
        pos = rng.integers(1, n, size=(moves, 2))
        pos.sort(axis=1)
        with np.errstate(divide="ignore"):
            thresholds = (-t) * np.log(rng.random(moves))
        pairs = pos.tolist()
        th = thresholds.tolist()
        for m in range(moves):
            i, j = pairs[m]
            if i == j:
                continue  # a proposal needs two distinct positions
            ci = cur[i]
            cj = cur[j]
            a = cur[i - 1]
            e = cur[j + 1] if j + 1 < n else cur[0]
            row_a = dl[a]
            delta = row_a[cj] + dl[ci][e] - row_a[ci] - dl[cj][e]
            if delta <= 0.0 or delta < th[m]:
                cur[i : j + 1] = cur[i : j + 1][::-1]
                cur_len += delta
                if cur_len < best_len:
                    best_len = cur_len
                    best = cur[:]
        t *= cfg.cooling_rate

    tour = canonical_tour(best)
    return RunRecord(
        solver="sa",
        best_tour=tour,
        best_length=tour_length(d, tour),
        duration_s=time.perf_counter() - t0,
        evals=stages * moves + 1,
        seed=cfg.seed,
    )


def ordered_crossover(p1, p2, cut_lo: int, cut_hi: int) -> Tour:
    """Copy p1[cut_lo:cut_hi]; fill the rest with p2's cities in p2's cyclic
    order starting at cut_hi, skipping cities already present."""
    a = tuple(int(c) for c in p1)
    b = tuple(int(c) for c in p2)
    n = len(a)
    if sorted(a) != sorted(b) or len(set(a)) != n:
        raise InvalidTourError("parents must be permutations of the same city set")
    if not 0 <= cut_lo < cut_hi <= n:
        raise InvalidParameterError(f"need 0 <= cut_lo < cut_hi <= {n}")
    child: list[int] = [-1] * n
    child[cut_lo:cut_hi] = a[cut_lo:cut_hi]
    present = set(a[cut_lo:cut_hi])
    pos = cut_hi % n
    for k in range(n):
        city = b[(cut_hi + k) % n]
        if city in present:
            continue
        child[pos] = city
        pos = (pos + 1) % n
    return tuple(child)


def swap_mutation(order, rate: float, seed: int = 0) -> Tour:
    """Each position swaps with a uniformly chosen partner with probability
    `rate`; a self-partner is a no-op. Expected swap events = rate * n."""
    if not 0 <= rate <= 1:
        raise InvalidParameterError(f"rate must be in [0, 1], got {rate}")
    t = list(tuple(int(c) for c in order))
    n = len(t)
    rng = make_rng(seed)
    hits = rng.random(n) < rate
    partners = rng.integers(0, n, size=n)
    for i in range(n):
        if hits[i]:
            j = int(partners[i])
            t[i], t[j] = t[j], t[i]
    return tuple(t)


def tournament_select(population, lengths, k: int, seed: int = 0):
    """Draw k members uniformly with replacement; return the shortest, ties
    to the lowest population index."""
    if not 1 <= k <= len(population):
        raise InvalidParameterError(f"need 1 <= k <= population size, got k={k}")
    rng = make_rng(seed)
    picks = rng.integers(0, len(population), size=k)
    best = min((int(i) for i in picks), key=lambda i: (lengths[i], i))
    return population[best]


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    mutation_rate: float = 0.05
    tournament_size: int = 3
    elitism_fraction: float = 0.10
    generations: int = 500
    stall_generations: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise InvalidParameterError("population must be >= 2")
        if not 0 <= self.mutation_rate <= 1:
            raise InvalidParameterError("mutation_rate must be in [0, 1]")
        if not 1 <= self.tournament_size <= self.population:
            raise InvalidParameterError("need 1 <= tournament_size <= population")
        if not 0 <= self.elitism_fraction < 1:
            raise InvalidParameterError("elitism_fraction must be in [0, 1)")
        if self.generations < 0 or self.stall_generations < 1:
            raise InvalidParameterError("bad generation limits")


def genetic_algorithm(d: np.ndarray, cfg: GaConfig | None = None) -> RunRecord:
    """Elitism plus tournament-selected parents, ordered crossover with a
    uniformly random cut pair, then swap mutation. Stops at the generation
    limit or after stall_generations without a better best-ever tour,
    whichever comes first. evals counts tour-length evaluations.
    """
    cfg = cfg or GaConfig()
    d = validate_distance_matrix(d)
    n = d.shape[0]
    rng = make_rng(cfg.seed)
    pop_size = cfg.population
    elite = max(1, round(cfg.elitism_fraction * pop_size))
    kids = pop_size - elite

    def lengths_of(pop_arr: np.ndarray) -> np.ndarray:
        return d[pop_arr, np.roll(pop_arr, -1, axis=1)].sum(axis=1)

    pop = np.array([rng.permutation(n) for _ in range(pop_size)])
    lengths = lengths_of(pop)
    evals = pop_size
    best_idx = int(np.argmin(lengths))
    best_len = float(lengths[best_idx])
    best = list(pop[best_idx])
    stall = 0
    t0 = time.perf_counter()

    for _ in range(cfg.generations):
        if stall >= cfg.stall_generations:
            break
        order = np.argsort(lengths, kind="stable")
        elites = pop[order[:elite]]
        # bulk draws for the whole brood keep the generator call count small
        tournament = rng.integers(0, pop_size, size=(kids, 2, cfg.tournament_size))
        cuts = rng.integers(0, n + 1, size=(kids, 2))
        while True:
            equal = cuts[:, 0] == cuts[:, 1]
            if not equal.any():
                break
            cuts[equal] = rng.integers(0, n + 1, size=(int(equal.sum()), 2))
        cuts.sort(axis=1)
        mut_hits = rng.random(size=(kids, n)) < cfg.mutation_rate
        mut_partners = rng.integers(0, n, size=(kids, n))

        pop_list = pop.tolist()
        len_list = lengths.tolist()
        children = []
        for c in range(kids):
            parents = []
            for side in range(2):
                picks = tournament[c, side]
                w = min((int(i) for i in picks), key=lambda i: (len_list[i], i))
                parents.append(pop_list[w])
            lo, hi = int(cuts[c, 0]), int(cuts[c, 1])
            child = list(ordered_crossover(parents[0], parents[1], lo, hi))
            for i in range(n):
                if mut_hits[c, i]:
                    j = int(mut_partners[c, i])
                    child[i], child[j] = child[j], child[i]
            children.append(child)

        pop = np.concatenate([elites, np.array(children, dtype=pop.dtype)])
        child_lengths = lengths_of(pop[elite:])
        evals += kids
        lengths = np.concatenate([lengths[order[:elite]], child_lengths])
        gen_best = int(np.argmin(lengths))
        if float(lengths[gen_best]) < best_len:
            best_len = float(lengths[gen_best])
            best = list(pop[gen_best])
            stall = 0
        else:
            stall += 1

    tour = canonical_tour(best)
    return RunRecord(
        solver="ga",
        best_tour=tour,
        best_length=tour_length(d, tour),
        duration_s=time.perf_counter() - t0,
        evals=evals,
        seed=cfg.seed,
    )


def hybrid_refine(
    d: np.ndarray, seed_tour, solver: str = "hybrid", seed: int = 0
) -> RunRecord:
    """2-opt descent from a seed tour (for refining sampled quantum tours).

    The descent itself is deterministic; `seed` only labels the record with
    the seed of whatever produced the starting tour.
    """
    d = validate_distance_matrix(d)
    check_tour(seed_tour, d.shape[0])
    t0 = time.perf_counter()
    refined, delta_evals = _two_opt_with_stats(d, seed_tour)
    tour = canonical_tour(refined)
    return RunRecord(
        solver=solver,
        best_tour=tour,
        best_length=tour_length(d, tour),
        duration_s=time.perf_counter() - t0,
        evals=delta_evals + 1,
        seed=seed,
    )
