"""Benchmark harness: repeated seeded trials across solvers and instances,
approximation ratios, energy estimates, Wilcoxon significance tests, a
fuel/CO2 impact projection, and report export (CSV, JSON, SVG).

Determinism: per-trial seeds are derived from the master seed plus the
instance id, solver label, and trial index, so adding a solver or instance
never shifts existing trials, and reruns reproduce every column except
duration_s and energy_j (wall-clock and anything priced from it).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .classical import GaConfig, SaConfig, genetic_algorithm, hybrid_refine, simulated_annealing
from .errors import (
    InvalidConfigurationError,
    InvalidParameterError,
    OracleViolationError,
    RouteLabError,
)
from .exact import HELD_KARP_MAX, Tour, held_karp
from .fileio import atomic_write_text
from .graph import distance_matrix, gen_clustered, gen_uniform
from .qaoa import OptimizerConfig, run_qaoa
from .qubo import encode_tsp
from .rng import derive_seed, make_rng

__all__ = [
    "approximation_ratio",
    "EnergyModel",
    "builtin_profiles",
    "energy_estimate",
    "WilcoxonResult",
    "wilcoxon_signed_rank",
    "impact_projection",
    "SolverSpec",
    "SuiteConfig",
    "suite_from_json",
    "validate_solver_options",
    "suite_to_json",
    "InstanceInfo",
    "TrialRecord",
    "PairwiseTest",
    "SolverAggregate",
    "BenchmarkReport",
    "run_benchmark",
    "run_solver_trial",
    "compute_aggregates",
    "report_to_json",
    "report_from_json",
    "report_to_csv",
    "export_report",
    "CSV_HEADER",
    "WILCOXON_EXACT_MAX",
]

# Oracle slack: found lengths may undershoot the optimum by float noise only.
ORACLE_TOL = 1e-9
# Full 2^n sign-pattern enumeration up to here; normal approximation beyond.
WILCOXON_EXACT_MAX = 20

CSV_HEADER = (
    "instance_id,n,solver,trial,seed,best_length,optimal_length,"
    "ratio,duration_s,energy_j,evals"
)


def approximation_ratio(found: float, optimal: float) -> float:
    """optimal / found, capped at 1 so float noise cannot push it above.

    A found length materially below the exact optimum means a broken oracle
    or solver, and raises instead of returning a ratio above 1.
    """
    if optimal <= 0:
        raise InvalidParameterError(f"optimal length must be positive, got {optimal}")
    if found < optimal - ORACLE_TOL:
        raise OracleViolationError(
            f"found length {found!r} beats the exact optimum {optimal!r}"
        )
    return min(1.0, optimal / found)


@dataclass(frozen=True)
class EnergyModel:
    """Per-solver average power draws in watts, with an optional
    joules-per-evaluation override that takes precedence when present."""

    name: str
    power_w: dict
    joules_per_eval: dict = field(default_factory=dict)

    def __post_init__(self):
        for label, watts in self.power_w.items():
            if watts <= 0:
                raise InvalidParameterError(f"power for {label!r} must be positive")
        for label, jpe in self.joules_per_eval.items():
            if jpe <= 0:
                raise InvalidParameterError(f"joules/eval for {label!r} must be positive")


def builtin_profiles() -> dict[str, EnergyModel]:
    """Shipped energy profiles.

    "cpu-65w" prices every solver at a 65 W CPU package; on a simulator the
    quantum runs are CPU work too, so this is the honest default.
    "device-implied" back-computes per-solver draws from paired reference
    (energy, runtime) points; the sub-picowatt quantum figure is a modeling
    convention, not a measurement, and reports always name the profile used.
    """
    solvers = ("sa", "ga", "qaoa", "hybrid", "exact")
    cpu = EnergyModel("cpu-65w", power_w={k: 65.0 for k in solvers})
    qaoa_power = 4.5e-13 / 3.2
    classical_power = 1.2e-9 / 9.8
    device = EnergyModel(
        "device-implied",
        power_w={
            "qaoa": qaoa_power,
            "sa": classical_power,
            "ga": classical_power,
            "hybrid": classical_power,
            "exact": classical_power,
        },
    )
    return {cpu.name: cpu, device.name: device}


def energy_estimate(
    duration_s: float, model: EnergyModel, solver: str, evals: int | None = None
) -> float:
    """power(solver) * duration, or joules/eval * evals when the override is set."""
    if duration_s < 0:
        raise InvalidParameterError(f"duration must be nonnegative, got {duration_s}")
    if solver in model.joules_per_eval:
        if evals is None:
            raise InvalidConfigurationError(
                f"profile {model.name!r} prices {solver!r} per evaluation; pass evals"
            )
        return model.joules_per_eval[solver] * evals
    if solver not in model.power_w:
        raise InvalidConfigurationError(
            f"profile {model.name!r} has no power entry for solver {solver!r}"
        )
    return model.power_w[solver] * duration_s


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test


@dataclass(frozen=True)
class WilcoxonResult:
    w: float
    p: float
    method: str  # "exact" | "normal" | "degenerate"
    n_effective: int


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    srt = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and srt[j + 1] == srt[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _wilcoxon_exact_p(ranks: np.ndarray, w: float) -> float:
    """Two-sided p by enumerating all 2^n sign patterns.

    Midranks step in halves, so doubling them gives integers and the
    distribution of 2*W+ fits an exact integer-count table.
    """
    r2 = np.rint(ranks * 2.0).astype(np.int64)
    total = int(r2.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in r2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    w2 = int(round(2.0 * w))
    lo = int(counts[: w2 + 1].sum())
    hi_start = total - w2
    hi = int(counts[hi_start:].sum())
    overlap = int(counts[hi_start : w2 + 1].sum()) if hi_start <= w2 else 0
    return (lo + hi - overlap) / float(2 ** ranks.size)


def _wilcoxon_normal_p(ranks: np.ndarray, w: float) -> float:
    """Normal approximation with midrank tie correction and a continuity
    correction of 0.5 toward the mean."""
    n = ranks.size
    mu = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    sigma2 = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_sizes**3 - tie_sizes).sum()) / 48.0
    if sigma2 <= 0:
        return 1.0
    z = (w - mu + 0.5) / math.sqrt(sigma2)
    return min(1.0, 2.0 * 0.5 * (1.0 + math.erf(z / math.sqrt(2.0))))


def wilcoxon_signed_rank(x, y) -> WilcoxonResult:
    """Paired two-sided test on ranks of |x - y|; zero differences dropped,
    ties get midranks, W = min(W+, W-). Exact enumeration for effective
    n <= 20, else the tie-corrected normal approximation. All-zero
    differences give the degenerate p = 1.0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 1:
        raise InvalidParameterError("need two equal-length 1-D samples")
    diff = x - y
    diff = diff[diff != 0]
    n = int(diff.size)
    if n == 0:
        return WilcoxonResult(w=0.0, p=1.0, method="degenerate", n_effective=0)
    ranks = _midranks(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    w = min(w_plus, w_minus)
    if n <= WILCOXON_EXACT_MAX:
        return WilcoxonResult(w, min(1.0, _wilcoxon_exact_p(ranks, w)), "exact", n)
    return WilcoxonResult(w, _wilcoxon_normal_p(ranks, w), "normal", n)


# ---------------------------------------------------------------------------
# Impact projection


def impact_projection(
    baseline_fuel_ej: float, improvement: float, emission_factor_g_per_mj: float
) -> tuple[float, float]:
    """(fuel saved in EJ/year, CO2 avoided in tonnes/year).

    fuel_saved = baseline * improvement; tonnes = fuel_saved * 1e12 MJ/EJ
    * factor g/MJ / 1e6 g/t, which collapses to fuel_saved * factor * 1e6.
    """
    if baseline_fuel_ej <= 0 or emission_factor_g_per_mj <= 0:
        raise InvalidParameterError("baseline and emission factor must be positive")
    if not 0 < improvement < 1:
        raise InvalidParameterError("improvement must be a fraction in (0, 1)")
    fuel_saved = baseline_fuel_ej * improvement
    co2_tonnes = fuel_saved * emission_factor_g_per_mj * 1e6
    return fuel_saved, co2_tonnes


# ---------------------------------------------------------------------------
# Suite configuration


@dataclass(frozen=True)
class SolverSpec:
    kind: str
    label: str
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SuiteConfig:
    name: str
    master_seed: int
    trials: int
    sizes: tuple[int, ...]
    instances_per_size: int
    generator: dict
    solvers: tuple[SolverSpec, ...]
    energy_profile: str = "cpu-65w"
    output_dir: str | None = None


_TOP_KEYS = {
    "name",
    "master_seed",
    "trials",
    "sizes",
    "instances_per_size",
    "generator",
    "solvers",
    "energy_profile",
    "output_dir",
}
_GEN_KEYS = {"uniform": {"kind", "bbox"}, "clustered": {"kind", "bbox", "k", "spread"}}
_SA_KEYS = {"t_initial", "t_final", "cooling_rate", "moves_per_temp"}
_GA_KEYS = {
    "population",
    "mutation_rate",
    "tournament_size",
    "elitism_fraction",
    "generations",
    "stall_generations",
}
_QAOA_KEYS = {"p", "mixer", "optimizer", "max_evals", "shots", "qubit_cap", "objective_shots"}
_SOLVER_KEYS = {
    "sa": _SA_KEYS,
    "ga": _GA_KEYS,
    "qaoa": _QAOA_KEYS,
    "hybrid": _QAOA_KEYS,
    "exact": set(),
}


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise InvalidConfigurationError(f"{where}: unknown key {unknown[0]!r}")


def suite_from_json(obj: dict) -> SuiteConfig:
    """Validate a suite description; unknown keys are rejected with their path."""
    if not isinstance(obj, dict):
        raise InvalidConfigurationError("suite config must be a JSON object")
    _reject_unknown(obj, _TOP_KEYS, "suite")
    for key in ("sizes", "solvers"):
        if key not in obj:
            raise InvalidConfigurationError(f"suite: missing required key {key!r}")
    sizes = tuple(int(s) for s in obj["sizes"])
    if not sizes or any(s < 3 for s in sizes):
        raise InvalidConfigurationError("suite.sizes: need sizes, all >= 3")
    trials = int(obj.get("trials", 30))
    if trials < 1:
        raise InvalidConfigurationError("suite.trials: must be >= 1")
    per_size = int(obj.get("instances_per_size", 1))
    if per_size < 1:
        raise InvalidConfigurationError("suite.instances_per_size: must be >= 1")

    gen = dict(obj.get("generator", {"kind": "uniform", "bbox": 100.0}))
    kind = gen.get("kind", "uniform")
    if kind not in _GEN_KEYS:
        raise InvalidConfigurationError(f"suite.generator.kind: unknown kind {kind!r}")
    _reject_unknown(gen, _GEN_KEYS[kind], "suite.generator")
    gen.setdefault("kind", kind)
    if kind == "clustered" and ("k" not in gen or "spread" not in gen):
        raise InvalidConfigurationError("suite.generator: clustered needs k and spread")

    raw_solvers = obj["solvers"]
    if not isinstance(raw_solvers, list) or not raw_solvers:
        raise InvalidConfigurationError("suite.solvers: need a nonempty list")
    solvers = []
    labels = set()
    for idx, entry in enumerate(raw_solvers):
        where = f"suite.solvers[{idx}]"
        if not isinstance(entry, dict) or "kind" not in entry:
            raise InvalidConfigurationError(f"{where}: need an object with a 'kind'")
        skind = entry["kind"]
        if skind not in _SOLVER_KEYS:
            raise InvalidConfigurationError(f"{where}.kind: unknown solver {skind!r}")
        _reject_unknown(entry, _SOLVER_KEYS[skind] | {"kind", "label"}, where)
        label = str(entry.get("label", skind))
        if label in labels:
            raise InvalidConfigurationError(f"{where}.label: duplicate label {label!r}")
        labels.add(label)
        options = {k: v for k, v in entry.items() if k not in ("kind", "label")}
        validate_solver_options(skind, options, where)
        solvers.append(SolverSpec(kind=skind, label=label, options=options))

    return SuiteConfig(
        name=str(obj.get("name", "suite")),
        master_seed=int(obj.get("master_seed", 0)),
        trials=trials,
        sizes=sizes,
        instances_per_size=per_size,
        generator=gen,
        solvers=tuple(solvers),
        energy_profile=str(obj.get("energy_profile", "cpu-65w")),
        output_dir=obj.get("output_dir"),
    )


def validate_solver_options(kind: str, options: dict, where: str) -> None:
    """Raise InvalidConfigurationError (with `where` as path context) for any
    option set the named solver kind cannot accept."""
    # constructing the configs up front surfaces bad values before any run
    try:
        if kind == "sa":
            SaConfig(seed=0, **options)
        elif kind == "ga":
            GaConfig(seed=0, **options)
        elif kind in ("qaoa", "hybrid"):
            p = int(options.get("p", 3))
            if p < 1:
                raise InvalidParameterError("p must be >= 1")
            mixer = options.get("mixer", "xy")
            if mixer not in ("x", "xy"):
                raise InvalidParameterError(f"unknown mixer {mixer!r}")
            shots = int(options.get("shots", 1024))
            if shots < 1:
                raise InvalidParameterError("shots must be >= 1")
            if int(options.get("qubit_cap", 20)) < 1:
                raise InvalidParameterError("qubit_cap must be >= 1")
            OptimizerConfig(
                method=options.get("optimizer", "spsa"),
                max_evals=int(options.get("max_evals", 300)),
                objective_shots=options.get("objective_shots"),
            )
    except (TypeError, RouteLabError) as exc:
        raise InvalidConfigurationError(f"{where}: {exc}") from exc


def suite_to_json(suite: SuiteConfig) -> dict:
    return {
        "name": suite.name,
        "master_seed": suite.master_seed,
        "trials": suite.trials,
        "sizes": list(suite.sizes),
        "instances_per_size": suite.instances_per_size,
        "generator": dict(suite.generator),
        "solvers": [
            {"kind": s.kind, "label": s.label, **s.options} for s in suite.solvers
        ],
        "energy_profile": suite.energy_profile,
        "output_dir": suite.output_dir,
    }


# ---------------------------------------------------------------------------
# Records and report


@dataclass(frozen=True)
class InstanceInfo:
    instance_id: str
    n: int
    kind: str
    seed: int
    optimal_length: float | None
    ratio_mode: str  # "exact" against held_karp, "relative" to best found


@dataclass(frozen=True)
class TrialRecord:
    instance_id: str
    n: int
    solver: str
    trial: int
    seed: int
    best_tour: Tour | None
    best_length: float | None
    optimal_length: float | None
    ratio: float | None
    duration_s: float
    energy_j: float
    evals: int


@dataclass(frozen=True)
class PairwiseTest:
    solver_a: str
    solver_b: str
    w: float
    p: float
    method: str
    n_effective: int


@dataclass(frozen=True)
class SolverAggregate:
    solver: str
    n: int | None  # None = pooled over all sizes
    trials: int
    failures: int
    mean_ratio: float | None
    std_ratio: float | None
    mean_runtime_s: float | None
    mean_energy_j: float | None


@dataclass(frozen=True)
class BenchmarkReport:
    suite: dict
    config_hash: str
    created: str
    energy_profile: str
    instances: tuple[InstanceInfo, ...]
    records: tuple[TrialRecord, ...]
    skipped: tuple[dict, ...]
    aggregates_overall: tuple[SolverAggregate, ...]
    aggregates_by_size: tuple[SolverAggregate, ...]
    tests: tuple[PairwiseTest, ...]


def compute_aggregates(
    records,
) -> tuple[tuple[SolverAggregate, ...], tuple[SolverAggregate, ...]]:
    """Aggregates are a pure function of the stored records, so a report can
    always be recomputed from its per-trial data. Trials that produced no
    tour count as failures and are excluded from the means."""

    def build(group_records, solver, n):
        done = [r for r in group_records if r.best_length is not None]
        ratios = [r.ratio for r in done if r.ratio is not None]
        mean_ratio = float(np.mean(ratios)) if ratios else None
        std_ratio = float(np.std(ratios, ddof=1)) if len(ratios) >= 2 else None
        mean_rt = float(np.mean([r.duration_s for r in done])) if done else None
        mean_en = float(np.mean([r.energy_j for r in done])) if done else None
        return SolverAggregate(
            solver=solver,
            n=n,
            trials=len(group_records),
            failures=len(group_records) - len(done),
            mean_ratio=mean_ratio,
            std_ratio=std_ratio,
            mean_runtime_s=mean_rt,
            mean_energy_j=mean_en,
        )

    solvers = []
    for r in records:
        if r.solver not in solvers:
            solvers.append(r.solver)
    overall = []
    by_size = []
    for solver in solvers:
        mine = [r for r in records if r.solver == solver]
        overall.append(build(mine, solver, None))
        for n in sorted({r.n for r in mine}):
            by_size.append(build([r for r in mine if r.n == n], solver, n))
    return tuple(overall), tuple(by_size)


def _pairwise_tests(records) -> tuple[PairwiseTest, ...]:
    # paired on (instance, trial); pairs missing a length on either side drop
    solvers = []
    for r in records:
        if r.solver not in solvers:
            solvers.append(r.solver)
    by_key = {}
    for r in records:
        if r.best_length is not None:
            by_key[(r.solver, r.instance_id, r.trial)] = r.best_length
    tests = []
    for i, a in enumerate(solvers):
        for b in solvers[i + 1 :]:
            keys = sorted(
                {
                    (r.instance_id, r.trial)
                    for r in records
                    if r.solver == a and (a, r.instance_id, r.trial) in by_key
                }
                & {
                    (r.instance_id, r.trial)
                    for r in records
                    if r.solver == b and (b, r.instance_id, r.trial) in by_key
                }
            )
            if not keys:
                continue
            x = [by_key[(a, inst, t)] for inst, t in keys]
            y = [by_key[(b, inst, t)] for inst, t in keys]
            res = wilcoxon_signed_rank(x, y)
            tests.append(PairwiseTest(a, b, res.w, res.p, res.method, res.n_effective))
    return tuple(tests)


# ---------------------------------------------------------------------------
# Orchestration


def _generate_instance(suite: SuiteConfig, size: int, index: int):
    seed = derive_seed(suite.master_seed, "instance", size, index)
    gen = suite.generator
    if gen["kind"] == "uniform":
        g = gen_uniform(size, bbox=float(gen.get("bbox", 100.0)), seed=seed)
    else:
        g = gen_clustered(
            size,
            k=int(gen["k"]),
            spread=float(gen["spread"]),
            bbox=float(gen.get("bbox", 100.0)),
            seed=seed,
        )
    instance_id = f"{gen['kind']}-n{size}-i{index}"
    return instance_id, seed, distance_matrix(g)


def run_solver_trial(spec: SolverSpec, d: np.ndarray, qp, seed: int):
    """One seeded run of any solver kind on a distance matrix.

    `qp` is the instance's QUBO encoding, required for qaoa and hybrid and
    ignored otherwise (the benchmark loop builds it once per instance).
    Returns (best_tour | None, best_length | None, duration_s, evals).
    """
    opts = spec.options
    if spec.kind == "sa":
        rec = simulated_annealing(d, SaConfig(seed=seed, **opts))
        return rec.best_tour, rec.best_length, rec.duration_s, rec.evals
    if spec.kind == "ga":
        rec = genetic_algorithm(d, GaConfig(seed=seed, **opts))
        return rec.best_tour, rec.best_length, rec.duration_s, rec.evals
    if spec.kind == "exact":
        t0 = time.perf_counter()
        tour, length = held_karp(d)
        return tour, length, time.perf_counter() - t0, 1
    # qaoa and hybrid
    cfg = OptimizerConfig(
        method=opts.get("optimizer", "spsa"),
        max_evals=int(opts.get("max_evals", 300)),
        seed=seed,
        objective_shots=opts.get("objective_shots"),
    )
    result = run_qaoa(
        qp,
        p=int(opts.get("p", 3)),
        mixer=opts.get("mixer", "xy"),
        cfg=cfg,
        shots=int(opts.get("shots", 1024)),
        seed=derive_seed(seed, "shots"),
        qubit_cap=int(opts.get("qubit_cap", 20)),
    )
    if spec.kind == "qaoa":
        return result.best_tour, result.best_length, result.duration_s, result.evals
    if result.best_tour is not None:
        start = result.best_tour
    else:
        start = tuple(int(c) for c in make_rng(derive_seed(seed, "fallback")).permutation(d.shape[0]))
    refined = hybrid_refine(d, start, solver=spec.label, seed=seed)
    return (
        refined.best_tour,
        refined.best_length,
        result.duration_s + refined.duration_s,
        result.evals + refined.evals,
    )


def run_benchmark(
    suite: SuiteConfig, profiles: dict[str, EnergyModel] | None = None
) -> BenchmarkReport:
    """Run trials * solvers * instances; solvers over their size caps are
    recorded as skipped rather than failing the suite."""
    profiles = profiles or builtin_profiles()
    if suite.energy_profile not in profiles:
        raise InvalidConfigurationError(
            f"unknown energy profile {suite.energy_profile!r}; "
            f"have {sorted(profiles)}"
        )
    model = profiles[suite.energy_profile]

    instances = []
    matrices = {}
    for size in suite.sizes:
        for index in range(suite.instances_per_size):
            instance_id, gseed, d = _generate_instance(suite, size, index)
            matrices[instance_id] = d
            if size <= HELD_KARP_MAX:
                _, optimal = held_karp(d)
                mode = "exact"
            else:
                optimal, mode = None, "relative"
            instances.append(
                InstanceInfo(instance_id, size, suite.generator["kind"], gseed, optimal, mode)
            )

    records: list[TrialRecord] = []
    skipped: list[dict] = []
    for inst in instances:
        d = matrices[inst.instance_id]
        qp_cache = None
        for spec in suite.solvers:
            if spec.kind in ("qaoa", "hybrid"):
                cap = int(spec.options.get("qubit_cap", 20))
                needed = (inst.n - 1) ** 2
                if needed > cap:
                    skipped.append(
                        {
                            "instance_id": inst.instance_id,
                            "solver": spec.label,
                            "reason": f"needs {needed} qubits, cap is {cap}",
                        }
                    )
                    continue
                if qp_cache is None:
                    qp_cache = encode_tsp(d)
            if spec.kind == "exact" and inst.n > HELD_KARP_MAX:
                skipped.append(
                    {
                        "instance_id": inst.instance_id,
                        "solver": spec.label,
                        "reason": f"exact solver capped at n={HELD_KARP_MAX}",
                    }
                )
                continue
            for trial in range(suite.trials):
                seed = derive_seed(suite.master_seed, inst.instance_id, spec.label, trial)
                tour, length, duration, evals = run_solver_trial(spec, d, qp_cache, seed)
                if length is not None and inst.ratio_mode == "exact":
                    ratio = approximation_ratio(length, inst.optimal_length)
                else:
                    ratio = None  # relative ratios are filled in below
                records.append(
                    TrialRecord(
                        instance_id=inst.instance_id,
                        n=inst.n,
                        solver=spec.label,
                        trial=trial,
                        seed=seed,
                        best_tour=tour,
                        best_length=length,
                        optimal_length=inst.optimal_length,
                        ratio=ratio,
                        duration_s=duration,
                        energy_j=_energy_for(model, spec, duration, evals),
                        evals=evals,
                    )
                )

    # instances without an exact oracle: ratios relative to the best found
    relative_ids = {i.instance_id for i in instances if i.ratio_mode == "relative"}
    if relative_ids:
        best_found = {}
        for r in records:
            if r.instance_id in relative_ids and r.best_length is not None:
                cur = best_found.get(r.instance_id)
                if cur is None or r.best_length < cur:
                    best_found[r.instance_id] = r.best_length
        records = [
            r
            if r.instance_id not in relative_ids or r.best_length is None
            else dataclasses.replace(
                r, ratio=min(1.0, best_found[r.instance_id] / r.best_length)
            )
            for r in records
        ]

    overall, by_size = compute_aggregates(records)
    suite_json = suite_to_json(suite)
    config_hash = hashlib.sha256(
        json.dumps(suite_json, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return BenchmarkReport(
        suite=suite_json,
        config_hash=config_hash,
        created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        energy_profile=suite.energy_profile,
        instances=tuple(instances),
        records=tuple(records),
        skipped=tuple(skipped),
        aggregates_overall=overall,
        aggregates_by_size=by_size,
        tests=_pairwise_tests(records),
    )


def _energy_for(model: EnergyModel, spec: SolverSpec, duration: float, evals: int) -> float:
    # label first so custom labels can carry their own prices, kind as fallback
    key = spec.label
    if key not in model.power_w and key not in model.joules_per_eval:
        key = spec.kind
    return energy_estimate(duration, model, key, evals)


# ---------------------------------------------------------------------------
# Export


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def report_to_csv(report: BenchmarkReport) -> str:
    """Per-trial CSV under the frozen column schema. An empty optimal_length
    cell means the instance had no exact oracle and the ratio is relative to
    the best length any solver found."""
    lines = [CSV_HEADER]
    for r in report.records:
        lines.append(
            ",".join(
                [
                    r.instance_id,
                    str(r.n),
                    r.solver,
                    str(r.trial),
                    str(r.seed),
                    _fmt(r.best_length),
                    _fmt(r.optimal_length),
                    _fmt(r.ratio),
                    _fmt(r.duration_s),
                    _fmt(r.energy_j),
                    str(r.evals),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: BenchmarkReport) -> dict:
    def agg(a: SolverAggregate) -> dict:
        return {
            "solver": a.solver,
            "n": a.n,
            "trials": a.trials,
            "failures": a.failures,
            "mean_ratio": a.mean_ratio,
            "std_ratio": a.std_ratio,
            "mean_runtime_s": a.mean_runtime_s,
            "mean_energy_j": a.mean_energy_j,
        }

    return {
        "suite": report.suite,
        "config_hash": report.config_hash,
        "created": report.created,
        "energy_profile": report.energy_profile,
        "instances": [
            {
                "instance_id": i.instance_id,
                "n": i.n,
                "kind": i.kind,
                "seed": i.seed,
                "optimal_length": i.optimal_length,
                "ratio_mode": i.ratio_mode,
            }
            for i in report.instances
        ],
        "records": [
            {
                "instance_id": r.instance_id,
                "n": r.n,
                "solver": r.solver,
                "trial": r.trial,
                "seed": r.seed,
                "best_tour": None if r.best_tour is None else list(r.best_tour),
                "best_length": r.best_length,
                "optimal_length": r.optimal_length,
                "ratio": r.ratio,
                "duration_s": r.duration_s,
                "energy_j": r.energy_j,
                "evals": r.evals,
            }
            for r in report.records
        ],
        "skipped": list(report.skipped),
        "aggregates": {
            "overall": [agg(a) for a in report.aggregates_overall],
            "by_size": [agg(a) for a in report.aggregates_by_size],
        },
        "tests": [
            {
                "solver_a": t.solver_a,
                "solver_b": t.solver_b,
                "w": t.w,
                "p": t.p,
                "method": t.method,
                "n_effective": t.n_effective,
            }
            for t in report.tests
        ],
    }


def report_from_json(obj: dict) -> BenchmarkReport:
    def agg(a: dict) -> SolverAggregate:
        return SolverAggregate(
            solver=a["solver"],
            n=a["n"],
            trials=a["trials"],
            failures=a["failures"],
            mean_ratio=a["mean_ratio"],
            std_ratio=a["std_ratio"],
            mean_runtime_s=a["mean_runtime_s"],
            mean_energy_j=a["mean_energy_j"],
        )

    return BenchmarkReport(
        suite=obj["suite"],
        config_hash=obj["config_hash"],
        created=obj["created"],
        energy_profile=obj["energy_profile"],
        instances=tuple(
            InstanceInfo(
                i["instance_id"], i["n"], i["kind"], i["seed"], i["optimal_length"], i["ratio_mode"]
            )
            for i in obj["instances"]
        ),
        records=tuple(
            TrialRecord(
                instance_id=r["instance_id"],
                n=r["n"],
                solver=r["solver"],
                trial=r["trial"],
                seed=r["seed"],
                best_tour=None if r["best_tour"] is None else tuple(r["best_tour"]),
                best_length=r["best_length"],
                optimal_length=r["optimal_length"],
                ratio=r["ratio"],
                duration_s=r["duration_s"],
                energy_j=r["energy_j"],
                evals=r["evals"],
            )
            for r in obj["records"]
        ),
        skipped=tuple(obj["skipped"]),
        aggregates_overall=tuple(agg(a) for a in obj["aggregates"]["overall"]),
        aggregates_by_size=tuple(agg(a) for a in obj["aggregates"]["by_size"]),
        tests=tuple(
            PairwiseTest(
                t["solver_a"], t["solver_b"], t["w"], t["p"], t["method"], t["n_effective"]
            )
            for t in obj["tests"]
        ),
    )


def _line_chart(path: str, title: str, ylabel: str, series, logy: bool = False) -> None:
    from matplotlib.figure import Figure  # heavy import, only when plotting

    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    for label, xs, ys in series:
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel("problem size n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if logy:
        ax.set_yscale("log")
    if series:
        ax.legend()
    ax.grid(True, alpha=0.3)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".svg")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _series(report: BenchmarkReport, attr: str):
    out = []
    solvers = []
    for a in report.aggregates_by_size:
        if a.solver not in solvers:
            solvers.append(a.solver)
    for solver in solvers:
        points = [
            (a.n, getattr(a, attr))
            for a in report.aggregates_by_size
            if a.solver == solver and getattr(a, attr) is not None
        ]
        if points:
            points.sort()
            out.append((solver, [p[0] for p in points], [p[1] for p in points]))
    return out


def export_report(
    report: BenchmarkReport, out_dir: str, formats=("csv", "json", "svg")
) -> list[str]:
    """Write report.csv / report.json / the three per-size SVG charts
    (mean ratio, runtime, energy vs n, one line per solver)."""
    bad = [f for f in formats if f not in ("csv", "json", "svg")]
    if bad:
        raise InvalidParameterError(f"unknown export format {bad[0]!r}")
    paths = []
    try:
        if "csv" in formats:
            paths.append(
                atomic_write_text(os.path.join(out_dir, "report.csv"), report_to_csv(report))
            )
        if "json" in formats:
            paths.append(
                atomic_write_text(
                    os.path.join(out_dir, "report.json"),
                    json.dumps(report_to_json(report), indent=2) + "\n",
                )
            )
        if "svg" in formats:
            charts = [
                ("ratio_vs_n.svg", "Approximation ratio", "mean_ratio", False),
                ("runtime_vs_n.svg", "Runtime", "mean_runtime_s", False),
                ("energy_vs_n.svg", "Estimated energy", "mean_energy_j", True),
            ]
            ylabels = {
                "mean_ratio": "mean approximation ratio",
                "mean_runtime_s": "mean runtime (s)",
                "mean_energy_j": "mean energy (J)",
            }
            for fname, title, attr, logy in charts:
                path = os.path.join(out_dir, fname)
                _line_chart(path, title, ylabels[attr], _series(report, attr), logy)
                paths.append(path)
    except OSError as exc:
        raise RouteLabError(f"could not write report into {out_dir!r}: {exc}") from exc
    return paths
