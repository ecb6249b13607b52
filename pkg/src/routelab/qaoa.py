"""Exact dense statevector QAOA over a QuboProblem.

State layout
    amplitudes[b] is the amplitude of the bitstring x with b = sum_k x[k]*2**k,
    i.e. variable k lives on bit k (LSB first). Reshaped to [2]*q in C order,
    variable k sits on axis q-1-k. This ordering is frozen; golden tests
    depend on it.

Circuit
    init_state, then p alternating layers of the diagonal phase separator
    exp(-i*gamma*E(x)) and a mixer. Two mixers ship:

    * transverse X: exp(-i*beta*X_k) on every qubit, the closed form
      cos(beta)*I - i*sin(beta)*X per qubit.
    * XY ring per slot: the reduced encoding's variables form one group per
      tour slot; within each group (ascending slot order) the pair gate
      exp(-i*beta*(XX+YY)/2) is applied along the ring 0-1, 1-2, ..., last-0
      in that fixed order. A 2-ring's two edges coincide, so they get one
      gate. This is a Trotterized ring mixer, not the exact ring
      exponential. Each pair gate acts on the {01, 10} subspace as
      [[cos b, -i sin b], [-i sin b, cos b]] and leaves {00, 11} alone, so
      per-group Hamming weight is conserved exactly: amplitudes that start
      at zero outside the one-hot-per-slot subspace stay exactly zero.

The optimization objective is the exact expectation by default (no shot
noise); set OptimizerConfig.objective_shots to optimize on sampled estimates
instead.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    InstanceTooLargeError,
    InvalidConfigurationError,
    InvalidParameterError,
)
from .exact import Tour, canonical_tour, tour_length
from .qubo import Infeasible, QuboProblem, bits_of, decode, energy_table
from .rng import derive_seed, make_rng

__all__ = [
    "MixerKind",
    "Statevector",
    "QaoaParams",
    "OptimizerConfig",
    "QaoaRunResult",
    "DEFAULT_QUBIT_CAP",
    "init_state",
    "apply_phase_separator",
    "apply_mixer",
    "evolve",
    "expectation",
    "sample",
    "initial_ramp",
    "optimize_params",
    "run_qaoa",
    "result_to_json",
]

DEFAULT_QUBIT_CAP = 20


class MixerKind(str, enum.Enum):
    X = "x"
    XY = "xy"


@dataclass
class Statevector:
    amplitudes: np.ndarray
    q: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.q,):
            raise InvalidParameterError(
                f"need 2**{self.q} amplitudes, got shape {amps.shape}"
            )
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(v) for v in self.gammas)
        b = tuple(float(v) for v in self.betas)
        if len(g) < 1 or len(g) != len(b):
            raise InvalidParameterError(
                "need p >= 1 with matching gamma and beta counts"
            )
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return len(self.gammas)


def initial_ramp(p: int) -> QaoaParams:
    """Linear ramp: gamma_k = 0.1*k/p rising, beta_k = 0.1*(1 - k/p) falling."""
    if p < 1:
        raise InvalidParameterError(f"depth must be >= 1, got {p}")
    gammas = tuple(0.1 * k / p for k in range(1, p + 1))
    betas = tuple(0.1 * (1 - k / p) for k in range(1, p + 1))
    return QaoaParams(gammas, betas)


def _slot_groups(qp: QuboProblem) -> list[list[int]]:
    # one-hot groups of the reduced encoding: the variables of each tour slot
    n = qp.n_cities
    return [[qp.var_of(i, t) for i in range(1, n)] for t in range(1, n)]


def _ring_pairs(group: list[int]) -> list[tuple[int, int]]:
    if len(group) == 2:
        return [(group[0], group[1])]  # a 2-ring's two edges coincide
    pairs = [(group[i], group[i + 1]) for i in range(len(group) - 1)]
    pairs.append((group[-1], group[0]))
    return pairs


def init_state(
    qp: QuboProblem, mixer: MixerKind | str, qubit_cap: int = DEFAULT_QUBIT_CAP
) -> Statevector:
    """X mixer: uniform superposition over all bitstrings. XY mixer: uniform
    superposition over exactly the (n-1)! tour encodings."""
    mixer = MixerKind(mixer)
    nv = qp.n_vars
    if nv > qubit_cap:
        raise InstanceTooLargeError(
            f"instance needs {nv} qubits but the cap is {qubit_cap}; "
            "pass a larger qubit_cap to override"
        )
    if mixer is MixerKind.X:
        amps = np.full(1 << nv, 2.0 ** (-nv / 2), dtype=complex)
        return Statevector(amps, nv)
    if not qp.reduced:
        raise InvalidConfigurationError(
            "the XY mixer needs the reduced encoding; its one-hot groups are the slot rows"
        )
    amps = np.zeros(1 << nv, dtype=complex)
    indices = []
    for perm in itertools.permutations(range(1, qp.n_cities)):
        idx = 0
        for slot, city in enumerate(perm, start=1):
            idx |= 1 << qp.var_of(city, slot)
        indices.append(idx)
    amps[indices] = 1.0 / math.sqrt(len(indices))
    return Statevector(amps, nv)


def apply_phase_separator(state: Statevector, qp: QuboProblem, gamma: float) -> Statevector:
    """Multiply each basis amplitude by exp(-i*gamma*E(x)); diagonal, unitary."""
    e = energy_table(qp, cap=max(state.q, 1))
    amps = state.amplitudes * np.exp((-1j * gamma) * e)
    return Statevector(amps, state.q)


def _apply_x_mixer(state: Statevector, beta: float) -> Statevector:
    nq = state.q
    c, s = math.cos(beta), math.sin(beta)
    arr = state.amplitudes.reshape([2] * nq)
    for k in range(nq):
        ax = nq - 1 - k
        a0 = np.take(arr, 0, axis=ax)
        a1 = np.take(arr, 1, axis=ax)
        arr = np.stack([c * a0 - 1j * s * a1, -1j * s * a0 + c * a1], axis=ax)
    return Statevector(arr.reshape(-1), nq)


def _apply_pair_gate(arr: np.ndarray, nq: int, ka: int, kb: int, c: float, s: float) -> None:
    # in place on the [2]*nq view; mixes only the {01, 10} subspace
    v = np.moveaxis(arr, (nq - 1 - ka, nq - 1 - kb), (0, 1))
    v01 = v[0, 1].copy()
    v10 = v[1, 0].copy()
    v[0, 1] = c * v01 - 1j * s * v10
    v[1, 0] = -1j * s * v01 + c * v10


def apply_mixer(
    state: Statevector, qp: QuboProblem, mixer: MixerKind | str, beta: float
) -> Statevector:
    mixer = MixerKind(mixer)
    if mixer is MixerKind.X:
        return _apply_x_mixer(state, beta)
    if not qp.reduced:
        raise InvalidConfigurationError(
            "the XY mixer needs the reduced encoding; its one-hot groups are the slot rows"
        )
    nq = state.q
    c, s = math.cos(beta), math.sin(beta)
    arr = state.amplitudes.reshape([2] * nq).copy()
    for group in _slot_groups(qp):
        for ka, kb in _ring_pairs(group):
            _apply_pair_gate(arr, nq, ka, kb, c, s)
    return Statevector(arr.reshape(-1), nq)


def evolve(
    qp: QuboProblem,
    params: QaoaParams,
    mixer: MixerKind | str,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> Statevector:
    state = init_state(qp, mixer, qubit_cap)
    for gamma, beta in zip(params.gammas, params.betas):
        state = apply_phase_separator(state, qp, gamma)
        state = apply_mixer(state, qp, mixer, beta)
    return state


def expectation(state: Statevector, qp: QuboProblem) -> float:
    """Energy expectation: sum_x |amp_x|^2 * E(x)."""
    e = energy_table(qp, cap=max(state.q, 1))
    return float(np.dot(state.probabilities(), e))


def sample(state: Statevector, shots: int, seed: int = 0) -> Counter:
    """Multiset of measured bitstrings (tuples in variable order), i.i.d.
    from |amp|^2; deterministic per seed."""
    if shots < 1:
        raise InvalidParameterError(f"shots must be >= 1, got {shots}")
    rng = make_rng(seed)
    p = state.probabilities()
    draws = rng.choice(p.size, size=shots, p=p / p.sum())
    counts = np.bincount(draws, minlength=p.size)
    out: Counter = Counter()
    for idx in np.flatnonzero(counts):
        out[tuple(int(b) for b in bits_of(int(idx), state.q))] = int(counts[idx])
    return out


@dataclass(frozen=True)
class OptimizerConfig:
    """Derivative-free parameter search settings.

    method "spsa": simultaneous-perturbation stochastic approximation with
    gain sequences a/(k+1+A)^alpha and c/(k+1)^gamma, Bernoulli +-1
    perturbations, two evaluations per iteration.
    method "coordinate": deterministic coordinate descent; steps one angle at
    a time, shrinking the step when a full sweep finds no improvement.
    """

    method: str = "spsa"
    max_evals: int = 300
    seed: int = 0
    spsa_a: float = 0.2
    spsa_c: float = 0.1
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101
    spsa_stability: float | None = None  # defaults to max_evals / 10
    cs_step: float = 0.25
    cs_shrink: float = 0.5
    cs_tolerance: float = 1e-3
    objective_shots: int | None = None

    def __post_init__(self):
        if self.method not in ("spsa", "coordinate"):
            raise InvalidConfigurationError(f"unknown optimizer method: {self.method!r}")
        if self.max_evals < 1:
            raise InvalidParameterError("max_evals must be >= 1")
        gains = (self.spsa_a, self.spsa_c, self.spsa_alpha, self.spsa_gamma)
        if any(g <= 0 for g in gains):
            raise InvalidParameterError("SPSA gains must all be positive")
        if self.spsa_stability is not None and self.spsa_stability < 0:
            raise InvalidParameterError("spsa_stability must be nonnegative")
        if self.cs_step <= 0 or not 0 < self.cs_shrink < 1 or self.cs_tolerance <= 0:
            raise InvalidParameterError("bad coordinate-search settings")
        if self.objective_shots is not None and self.objective_shots < 1:
            raise InvalidParameterError("objective_shots must be >= 1 when set")


def optimize_params(
    qp: QuboProblem,
    p: int,
    mixer: MixerKind | str,
    cfg: OptimizerConfig | None = None,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> tuple[QaoaParams, list[tuple[QaoaParams, float]]]:
    """Best-seen parameters by the (default exact) objective, plus the trace
    of every (params, value) evaluation. len(trace) <= max_evals."""
    cfg = cfg or OptimizerConfig()
    mixer = MixerKind(mixer)
    rng = make_rng(cfg.seed)
    trace: list[tuple[QaoaParams, float]] = []
    if qp.n_vars > qubit_cap:
        # same check evolve() makes, but before the exponential table build
        raise InstanceTooLargeError(
            f"instance needs {qp.n_vars} qubits but the cap is {qubit_cap}"
        )
    e_table = energy_table(qp, cap=max(qp.n_vars, 1))  # warm the cache

    def params_of(theta: np.ndarray) -> QaoaParams:
        return QaoaParams(tuple(theta[:p]), tuple(theta[p:]))

    def objective(theta: np.ndarray) -> float:
        prms = params_of(theta)
        state = evolve(qp, prms, mixer, qubit_cap)
        if cfg.objective_shots:
            counts = sample(
                state,
                cfg.objective_shots,
                seed=derive_seed(cfg.seed, "objective", len(trace)),
            )
            total = 0.0
            for bits, cnt in counts.items():
                idx = 0
                for k, v in enumerate(bits):
                    idx |= int(v) << k
                total += cnt * e_table[idx]
            value = total / cfg.objective_shots
        else:
            value = expectation(state, qp)
        trace.append((prms, value))
        return value

    start = initial_ramp(p)
    theta = np.array(start.gammas + start.betas)
    best_theta = theta.copy()
    best_val = objective(theta)
    budget = cfg.max_evals - 1

    if cfg.method == "spsa":
        stability = cfg.max_evals / 10 if cfg.spsa_stability is None else cfg.spsa_stability
        k = 0
        while budget >= 2:
            ak = cfg.spsa_a / (k + 1 + stability) ** cfg.spsa_alpha
            ck = cfg.spsa_c / (k + 1) ** cfg.spsa_gamma
            delta = rng.integers(0, 2, size=2 * p) * 2.0 - 1.0
            f_plus = objective(theta + ck * delta)
            f_minus = objective(theta - ck * delta)
            budget -= 2
            if f_plus < best_val:
                best_val, best_theta = f_plus, theta + ck * delta
            if f_minus < best_val:
                best_val, best_theta = f_minus, theta - ck * delta
            # delta entries are +-1, so elementwise 1/delta equals delta
            theta = theta - ak * (f_plus - f_minus) / (2.0 * ck) * delta
            k += 1
        if budget >= 1:
            final = objective(theta)
            if final < best_val:
                best_val, best_theta = final, theta.copy()
    else:
        step = cfg.cs_step
        while step >= cfg.cs_tolerance and budget > 0:
            improved = False
            for i in range(2 * p):
                for sign in (1.0, -1.0):
                    if budget <= 0:
                        break
                    cand = best_theta.copy()
                    cand[i] += sign * step
                    budget -= 1
                    value = objective(cand)
                    if value < best_val:
                        best_val, best_theta = value, cand
                        improved = True
                        break
            if not improved:
                step *= cfg.cs_shrink

    return params_of(best_theta), trace


@dataclass(frozen=True)
class QaoaRunResult:
    """Outcome of one optimize-evolve-sample-decode run. best_tour is None
    when no sampled bitstring decoded to a tour; that is a reported outcome,
    not an error."""

    best_tour: Tour | None
    best_length: float | None
    expectation: float
    feasible_fraction: float
    evals: int
    duration_s: float
    params: QaoaParams


def run_qaoa(
    qp: QuboProblem,
    p: int = 3,
    mixer: MixerKind | str = MixerKind.XY,
    cfg: OptimizerConfig | None = None,
    shots: int = 1024,
    seed: int = 0,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> QaoaRunResult:
    """Optimize angles, evolve, sample, decode everything.

    The feasible fraction is the share of shots whose bitstring decodes to a
    tour. The XY mixer confines amplitudes to the one-hot-per-slot subspace,
    which is necessary but not sufficient for decoding: a slot-wise one-hot
    state may still assign one city to two slots, so the fraction is
    generally below 1 even with the XY mixer.
    """
    t0 = time.perf_counter()
    cfg = cfg or OptimizerConfig()
    mixer = MixerKind(mixer)
    best_params, trace = optimize_params(qp, p, mixer, cfg, qubit_cap)
    state = evolve(qp, best_params, mixer, qubit_cap)
    counts = sample(state, shots, seed)
    feasible = 0
    best_tour = None
    best_len = math.inf
    for bits, cnt in counts.items():  # iteration order: ascending basis index
        outcome = decode(qp, np.array(bits, dtype=np.uint8))
        if isinstance(outcome, Infeasible):
            continue
        feasible += cnt
        length = tour_length(qp.distances, outcome)
        if length < best_len:
            best_len = length
            best_tour = outcome
    if best_tour is not None:
        best_tour = canonical_tour(best_tour)
        best_len = tour_length(qp.distances, best_tour)
    return QaoaRunResult(
        best_tour=best_tour,
        best_length=None if best_tour is None else best_len,
        expectation=expectation(state, qp),
        feasible_fraction=feasible / shots,
        evals=len(trace),
        duration_s=time.perf_counter() - t0,
        params=best_params,
    )


def result_to_json(result: QaoaRunResult) -> dict:
    return {
        "best_tour": None if result.best_tour is None else list(result.best_tour),
        "best_length": result.best_length,
        "expectation": result.expectation,
        "feasible_fraction": result.feasible_fraction,
        "evals": result.evals,
        "duration_s": result.duration_s,
        "params": {
            "gammas": list(result.params.gammas),
            "betas": list(result.params.betas),
        },
    }
