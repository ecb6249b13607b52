"""routelab: a route-optimization laboratory.

Synthetic TSP instances are encoded as QUBO penalty Hamiltonians and solved
three ways: an exact statevector QAOA engine (X or feasibility-preserving XY
mixers), classical heuristics (simulated annealing, a genetic algorithm, and
a QAOA-seeded 2-opt hybrid), and exact oracles (brute force, Held-Karp) that
anchor every reported approximation ratio. A benchmark harness runs seeded
trial matrices, prices runtime into energy estimates under named profiles,
tests solver pairs with an exact Wilcoxon signed-rank test, and projects
fleet-level fuel and CO2 impact from a routing improvement fraction.
"""

from .bench import (
    BenchmarkReport,
    EnergyModel,
    SolverSpec,
    SuiteConfig,
    TrialRecord,
    WilcoxonResult,
    approximation_ratio,
    builtin_profiles,
    compute_aggregates,
    energy_estimate,
    export_report,
    impact_projection,
    report_from_json,
    report_to_csv,
    report_to_json,
    run_benchmark,
    suite_from_json,
    suite_to_json,
    wilcoxon_signed_rank,
)
from .classical import (
    GaConfig,
    RunRecord,
    SaConfig,
    genetic_algorithm,
    hybrid_refine,
    metropolis_accept,
    ordered_crossover,
    simulated_annealing,
    swap_mutation,
    tournament_select,
)
from .errors import (
    InstanceTooLargeError,
    InvalidConfigurationError,
    InvalidInstanceError,
    InvalidParameterError,
    InvalidTourError,
    MalformedInputError,
    OracleViolationError,
    RouteLabError,
    UnsupportedFormatError,
)
from .exact import (
    brute_force_tsp,
    canonical_tour,
    check_tour,
    held_karp,
    tour_length,
    two_opt_descent,
)
from .graph import (
    Graph,
    distance_matrix,
    gen_clustered,
    gen_uniform,
    graph_from_json,
    graph_to_json,
    load_graph,
    parse_tsplib,
    perturb_weights,
    save_graph,
    validate_distance_matrix,
)
from .qaoa import (
    MixerKind,
    OptimizerConfig,
    QaoaParams,
    QaoaRunResult,
    Statevector,
    apply_mixer,
    apply_phase_separator,
    evolve,
    expectation,
    init_state,
    initial_ramp,
    optimize_params,
    run_qaoa,
    sample,
)
from .qubo import (
    Infeasible,
    Penalties,
    QuboProblem,
    decode,
    default_penalties,
    encode_tour,
    encode_tsp,
    energy_table,
    enumerate_ground_states,
    qubo_energy,
    qubo_to_json,
)
from .rng import derive_seed, make_rng

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graph
    "Graph",
    "gen_uniform",
    "gen_clustered",
    "distance_matrix",
    "validate_distance_matrix",
    "perturb_weights",
    "parse_tsplib",
    "graph_to_json",
    "graph_from_json",
    "save_graph",
    "load_graph",
    # exact
    "check_tour",
    "canonical_tour",
    "tour_length",
    "brute_force_tsp",
    "held_karp",
    "two_opt_descent",
    # qubo
    "Penalties",
    "default_penalties",
    "QuboProblem",
    "Infeasible",
    "encode_tsp",
    "qubo_energy",
    "decode",
    "encode_tour",
    "energy_table",
    "enumerate_ground_states",
    "qubo_to_json",
    # qaoa
    "MixerKind",
    "Statevector",
    "QaoaParams",
    "initial_ramp",
    "init_state",
    "apply_phase_separator",
    "apply_mixer",
    "evolve",
    "expectation",
    "sample",
    "OptimizerConfig",
    "optimize_params",
    "QaoaRunResult",
    "run_qaoa",
    # classical
    "RunRecord",
    "SaConfig",
    "simulated_annealing",
    "metropolis_accept",
    "GaConfig",
    "genetic_algorithm",
    "ordered_crossover",
    "swap_mutation",
    "tournament_select",
    "hybrid_refine",
    # bench
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
    "suite_to_json",
    "TrialRecord",
    "BenchmarkReport",
    "run_benchmark",
    "compute_aggregates",
    "report_to_csv",
    "report_to_json",
    "report_from_json",
    "export_report",
    # rng
    "make_rng",
    "derive_seed",
]
