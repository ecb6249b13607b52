"""Command line driver: generate instances, run a single solver, run full
benchmark suites, re-render stored reports, and print impact projections.

Exit codes: 0 on success, 2 on any validated failure (bad flags, bad files,
instances over solver caps). Every file output goes through the atomic
write helpers, so an interrupted command never leaves a partial file.
The default output directory is, in order: --output-dir, the suite config's
output_dir, the ROUTELAB_OUTPUT_DIR environment variable, then "routelab-out".
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .bench import (
    SolverSpec,
    builtin_profiles,
    export_report,
    impact_projection,
    report_from_json,
    run_benchmark,
    run_solver_trial,
    suite_from_json,
    validate_solver_options,
)
from .classical import RunRecord, record_to_json
from .errors import MalformedInputError, RouteLabError
from .exact import held_karp
from .fileio import atomic_write_text
from .graph import (
    distance_matrix,
    gen_clustered,
    gen_uniform,
    graph_from_json,
    graph_to_json,
    parse_tsplib,
)
from .qaoa import OptimizerConfig, result_to_json, run_qaoa
from .qubo import encode_tsp

OUTPUT_DIR_ENV = "ROUTELAB_OUTPUT_DIR"


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise RouteLabError(f"could not read {path!r}: {exc}") from exc


def _read_json(path: str) -> dict:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: not valid JSON ({exc})") from exc


def _load_instance(path: str):
    """Instance files are Graph JSON; a .tsp extension switches to TSPLIB."""
    if path.lower().endswith(".tsp"):
        return parse_tsplib(_read_text(path))
    return graph_from_json(_read_json(path))


def _output_dir(flag_value: str | None, config_value: str | None = None) -> str:
    return (
        flag_value
        or config_value
        or os.environ.get(OUTPUT_DIR_ENV)
        or "routelab-out"
    )


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    if args.kind == "tsplib":
        if not args.source:
            raise RouteLabError("--kind tsplib needs --source pointing at a .tsp file")
        g = parse_tsplib(_read_text(args.source))
    elif args.kind == "uniform":
        g = gen_uniform(args.n, bbox=args.bbox, seed=args.seed)
    else:
        if args.k is None or args.spread is None:
            raise RouteLabError("--kind clustered needs --k and --spread")
        g = gen_clustered(args.n, k=args.k, spread=args.spread, bbox=args.bbox, seed=args.seed)
    out = args.out or os.path.join(_output_dir(None), f"{g.name}.json")
    atomic_write_text(out, json.dumps(graph_to_json(g), indent=2) + "\n")
    print(f"wrote {out} (n={g.n})")
    return 0


def _solve_payload(args) -> dict:
    g = _load_instance(args.instance)
    d = distance_matrix(g)
    options = dict(json.loads(args.options)) if args.options else {}
    if args.solver in ("qaoa", "hybrid"):
        for key, value in (
            ("p", args.p),
            ("mixer", args.mixer),
            ("optimizer", args.optimizer),
            ("max_evals", args.max_evals),
            ("shots", args.shots),
            ("qubit_cap", args.qubit_cap),
        ):
            if value is not None:
                options[key] = value
    validate_solver_options(args.solver, options, "solve")
    spec = SolverSpec(kind=args.solver, label=args.solver, options=options)

    if args.solver == "qaoa":
        qp = encode_tsp(d)
        cfg = OptimizerConfig(
            method=options.get("optimizer", "spsa"),
            max_evals=int(options.get("max_evals", 300)),
            seed=args.seed,
            objective_shots=options.get("objective_shots"),
        )
        result = run_qaoa(
            qp,
            p=int(options.get("p", 3)),
            mixer=options.get("mixer", "xy"),
            cfg=cfg,
            shots=int(options.get("shots", 1024)),
            seed=args.seed,
            qubit_cap=int(options.get("qubit_cap", 20)),
        )
        payload = result_to_json(result)
        payload["solver"] = "qaoa"
        payload["seed"] = args.seed
        payload["p"] = int(options.get("p", 3))
        payload["mixer"] = options.get("mixer", "xy")
        return payload

    qp = encode_tsp(d) if args.solver == "hybrid" else None
    if args.solver == "exact":
        t0 = time.perf_counter()
        tour, length = held_karp(d)
        rec = RunRecord("exact", tour, length, time.perf_counter() - t0, 1, args.seed)
    else:
        tour, length, duration, evals = run_solver_trial(spec, d, qp, args.seed)
        rec = RunRecord(args.solver, tour, length, duration, evals, args.seed)
    return record_to_json(rec)


def cmd_solve(args) -> int:
    print(json.dumps(_solve_payload(args), indent=2))
    return 0


def _format_cell(value, spec: str) -> str:
    return "-" if value is None else format(value, spec)


def _print_aggregate_table(report) -> None:
    header = ("solver", "n", "trials", "fail", "mean_ratio", "std_ratio", "runtime_s", "energy_j")
    rows = []
    for group in (report.aggregates_overall, report.aggregates_by_size):
        for a in group:
            rows.append(
                (
                    a.solver,
                    "all" if a.n is None else str(a.n),
                    str(a.trials),
                    str(a.failures),
                    _format_cell(a.mean_ratio, ".4f"),
                    _format_cell(a.std_ratio, ".4f"),
                    _format_cell(a.mean_runtime_s, ".4f"),
                    _format_cell(a.mean_energy_j, ".3e"),
                )
            )
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(len(header))]
    print("  ".join(h.rjust(widths[i]) for i, h in enumerate(header)))
    for r in rows:
        print("  ".join(c.rjust(widths[i]) for i, c in enumerate(r)))


def cmd_benchmark(args) -> int:
    config = _read_json(args.config)
    # flags override the file
    if args.trials is not None:
        config["trials"] = args.trials
    if args.master_seed is not None:
        config["master_seed"] = args.master_seed
    if args.energy_profile is not None:
        config["energy_profile"] = args.energy_profile
    suite = suite_from_json(config)
    report = run_benchmark(suite, builtin_profiles())
    out_dir = _output_dir(args.output_dir, suite.output_dir)
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    paths = export_report(report, out_dir, formats=formats)
    _print_aggregate_table(report)
    for t in report.tests:
        print(
            f"wilcoxon {t.solver_a} vs {t.solver_b}: W={t.w:g} "
            f"p={t.p:.6g} ({t.method}, n={t.n_effective})"
        )
    for s in report.skipped:
        print(f"skipped {s['solver']} on {s['instance_id']}: {s['reason']}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_report(args) -> int:
    report = report_from_json(_read_json(args.input))
    out_dir = _output_dir(args.output_dir)
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    for p in export_report(report, out_dir, formats=formats):
        print(f"wrote {p}")
    return 0


def cmd_impact(args) -> int:
    fuel_ej, co2_t = impact_projection(args.baseline_ej, args.improvement, args.factor)
    print(json.dumps({"fuel_saved_ej": fuel_ej, "co2_avoided_t": co2_t}, indent=2))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routelab",
        description="Route-optimization lab: TSP instances, QAOA and classical solvers, benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"routelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write an instance JSON file")
    p_gen.add_argument("--kind", choices=("uniform", "clustered", "tsplib"), default="uniform")
    p_gen.add_argument("--n", type=int, default=5, help="number of cities")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--bbox", type=float, default=100.0)
    p_gen.add_argument("--k", type=int, default=None, help="cluster count (clustered)")
    p_gen.add_argument("--spread", type=float, default=None, help="cluster spread (clustered)")
    p_gen.add_argument("--source", default=None, help="input .tsp file (tsplib)")
    p_gen.add_argument("--out", default=None, help="output path (default: <name>.json in the output dir)")
    p_gen.set_defaults(func=cmd_generate)

    p_solve = sub.add_parser("solve", help="run one solver on an instance, print the run record")
    p_solve.add_argument("--solver", choices=("qaoa", "sa", "ga", "exact", "hybrid"), required=True)
    p_solve.add_argument("--instance", required=True, help="instance JSON (or .tsp) path")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--p", type=int, default=None, help="QAOA depth")
    p_solve.add_argument("--mixer", choices=("x", "xy"), default=None)
    p_solve.add_argument("--optimizer", choices=("spsa", "coordinate"), default=None)
    p_solve.add_argument("--max-evals", type=int, default=None)
    p_solve.add_argument("--shots", type=int, default=None)
    p_solve.add_argument("--qubit-cap", type=int, default=None)
    p_solve.add_argument("--options", default=None, help="extra solver options as a JSON object")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("benchmark", help="run a benchmark suite from a config file")
    p_bench.add_argument("--config", required=True, help="suite config JSON path")
    p_bench.add_argument("--output-dir", default=None)
    p_bench.add_argument("--formats", default="csv,json,svg")
    p_bench.add_argument("--trials", type=int, default=None, help="override suite trials")
    p_bench.add_argument("--master-seed", type=int, default=None, help="override suite master seed")
    p_bench.add_argument("--energy-profile", default=None, help="override suite energy profile")
    p_bench.set_defaults(func=cmd_benchmark)

    p_rep = sub.add_parser("report", help="re-export a stored report.json (e.g. regenerate charts)")
    p_rep.add_argument("--input", required=True, help="report.json path")
    p_rep.add_argument("--output-dir", default=None)
    p_rep.add_argument("--formats", default="svg")
    p_rep.set_defaults(func=cmd_report)

    p_imp = sub.add_parser("impact", help="fuel and CO2 projection for a routing improvement")
    p_imp.add_argument("--baseline-ej", type=float, default=31.95, help="baseline fuel use, EJ/year")
    p_imp.add_argument("--improvement", type=float, default=0.082, help="fractional fuel saving")
    p_imp.add_argument("--factor", type=float, default=74.14, help="emission factor, g CO2 per MJ")
    p_imp.set_defaults(func=cmd_impact)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage or the version string
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except RouteLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
