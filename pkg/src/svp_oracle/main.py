"""
Main entry point for the SVP Grover oracle toolkit.

Usage:
  svp-oracle oracle-build <basis>     Synthesize an oracle, write circuit + report
  svp-oracle oracle-verify <basis>    Exhaustively check an oracle
  svp-oracle grover <basis>           Plan (and optionally simulate) a Grover search
  svp-oracle sweep                    Oracle resource sweep over dimensions
  svp-oracle fit <sweep.json>         Fit sweep counts to the model families
  svp-oracle extrapolate <sweep.json> Extrapolate fits to cryptographic dimensions
  svp-oracle bkz <basis>              BKZ reduction with a classical or Grover-costed ledger
  svp-oracle crossover                Classical vs quantum blocksize crossover
"""

import argparse
import logging
import math
import sys
from datetime import datetime
from pathlib import Path

from svp_oracle import config
from svp_oracle.bkz import (
    DEFAULT_ENUMERATION_CONSTANT,
    Backend,
    BkzConfig,
    TerminationPolicy,
    bkz_reduce,
    bkz_report,
    crossover_analysis,
)
from svp_oracle.circuit import to_text
from svp_oracle.config import LOG_FILE, LOG_LEVEL
from svp_oracle.errors import (
    CircuitError,
    FitError,
    InvalidBasisError,
    InvalidInputError,
    ResourceCapError,
    SvpOracleError,
)
from svp_oracle.estimate import (
    METRIC_FAMILY,
    FitModel,
    extrapolate,
    extrapolation_report,
    fit_metric,
    fit_report,
    points_from_report,
    reference_cross_check,
    sweep,
    sweep_report,
)
from svp_oracle.grover import assemble_grover, plan_report, simulate_grover
from svp_oracle.lattice import read_basis, write_basis
from svp_oracle.oracle import (
    BoundMethod,
    ThresholdSource,
    choose_threshold,
    derive_bounds,
    oracle_report,
    synthesize_oracle,
)
from svp_oracle.reports import load_report, save_report, write_sweep_csv
from svp_oracle.sim import verify_oracle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_VERIFICATION = 4


def setup_logging():
    """Configure logging for the application."""
    LOG_FILE.parent.mkdir(parents=True, exist_ok=True)

    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(LOG_FILE),
        ],
    )


def print_header(title: str, mode: str):
    """Print command header."""
    print()
    print("=" * 80)
    print(f"  SVP ORACLE - {title}")
    print("=" * 80)
    print()
    print(f"  Started: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"  Mode: {mode}")
    print()
    print("-" * 80)


def print_footer():
    """Print command footer."""
    print("-" * 80)
    print(f"  Completed: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print("=" * 80)
    print()


# =============================================================================
# Policy Resolution
# =============================================================================


def resolve_encoding(args, basis):
    """Exactly one coefficient-bound policy; dual-basis with A = gh when none is given."""
    if args.bounds:
        return derive_bounds(basis, BoundMethod.EXPLICIT, [int(v) for v in args.bounds.split(",")])
    if args.uniform_d is not None:
        return derive_bounds(basis, BoundMethod.UNIFORM, args.uniform_d)
    if args.log_n:
        return derive_bounds(basis, BoundMethod.LOG_N)
    return derive_bounds(basis, BoundMethod.DUAL_BASIS, args.dual_a)


def resolve_threshold(args, basis):
    if args.threshold_sq is not None:
        return choose_threshold(basis, ThresholdSource.EXPLICIT, t_sq=args.threshold_sq)
    return choose_threshold(basis, ThresholdSource.GAUSSIAN_HEURISTIC, scale=args.threshold_scale)


def _build_oracle(args):
    basis = read_basis(args.basis)
    encoding = resolve_encoding(args, basis)
    threshold = resolve_threshold(args, basis)
    return basis, synthesize_oracle(basis, encoding, threshold)


def _save(args, report: dict, name: str) -> Path:
    return save_report(report, name, args.output_dir, timestamp=not args.no_timestamp)


# =============================================================================
# Commands
# =============================================================================


def cmd_oracle_build(args) -> int:
    """Synthesize the oracle for a basis file."""
    print_header(Path(args.basis).name, "oracle-build")
    _, oracle = _build_oracle(args)
    report = oracle_report(oracle)

    output_dir = Path(args.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    circuit_path = output_dir / f"{Path(args.basis).stem}.circuit"
    circuit_path.write_text(to_text(oracle.circuit))
    report["circuit_file"] = str(circuit_path)
    path = _save(args, report, "oracle_build")

    m = report["metrics"]
    print(f"  Bounds d: {report['bounds']} ({report['bound_method']})")
    print(f"  Input bits: {report['total_input_bits']}  N: {report['N']}")
    print(f"  Threshold: T={report['T']:.4f}, tau={report['tau']}")
    print()
    print(f"  Width: {m['width']:,}  Depth: {m['depth']:,}  Quantum cost: {m['quantum_cost']:,}")
    print(f"  T-count: {m['t_count']:,}  T-depth: {m['t_depth']:,}")
    print()
    print(f"  Circuit saved to: {circuit_path}")
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK


def cmd_oracle_verify(args) -> int:
    """Exhaustively verify the synthesized oracle, optionally with one gate deleted."""
    print_header(Path(args.basis).name, "oracle-verify")
    _, oracle = _build_oracle(args)
    circuit = oracle.circuit.without_gate(args.mutate) if args.mutate is not None else None
    result = verify_oracle(oracle, circuit)

    report = {
        "patterns_checked": result.patterns_checked,
        "failures": result.failures,
        "ancilla_violations": result.ancilla_violations,
        "input_preservation_violations": result.input_preservation_violations,
        "first_counterexample": result.first_counterexample,
        "mutated_gate": args.mutate,
        "passed": result.passed,
    }
    path = _save(args, report, "oracle_verify")

    print(f"  Patterns checked: {result.patterns_checked:,}")
    print(f"  Wrong outputs: {result.failures:,}")
    print(f"  Dirty ancillas: {result.ancilla_violations:,}")
    print(f"  Altered inputs: {result.input_preservation_violations:,}")
    if result.first_counterexample:
        print(f"  Counterexample: {result.first_counterexample}")
    print()
    print(f"  Result: {'PASS' if result.passed else 'FAIL'}")
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK if result.passed else EXIT_VERIFICATION


def cmd_grover(args) -> int:
    """Plan the Grover search around the oracle."""
    print_header(Path(args.basis).name, "grover")
    _, oracle = _build_oracle(args)
    _, plan = assemble_grover(oracle, args.solutions, emit=False)
    report = plan_report(plan)

    print(f"  N: {plan.N}  M: {plan.M}  Iterations: {plan.iterations}")
    print(f"  Success probability: {plan.success_probability:.6f}")
    print(f"  Total quantum cost: {plan.totals.quantum_cost:,}  T-count: {plan.totals.t_count:,}")

    if args.simulate:
        sim = simulate_grover(oracle)
        report["simulation"] = {
            "mode": sim.mode,
            "M_true": sim.M_true,
            "k": sim.iterations,
            "width": sim.width,
            "measured": sim.measured,
            "predicted": sim.predicted,
        }
        print()
        print(f"  Simulation ({sim.mode}, {sim.width} qubits): M_true={sim.M_true}, k={sim.iterations}")
        print(f"  Measured: {sim.measured:.6f}  Predicted: {sim.predicted:.6f}")

    path = _save(args, report, "grover")
    print()
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Oracle resource sweep over dimensions."""
    print_header("SWEEP", f"dims {args.dims}")
    dims = [int(v) for v in args.dims.split(",")]
    points = sweep(dims, seed=args.seed, jobs=args.jobs)

    report = sweep_report(points)
    path = _save(args, report, "sweep")
    csv_path = write_sweep_csv(points, Path(args.output_dir) / "sweep.csv")

    print(f"  {'n':>4} {'width':>10} {'depth':>12} {'cost':>14} {'T-count':>12} {'T-depth':>10}")
    for p in points:
        m = p.metrics
        print(f"  {p.n:>4} {m.width:>10,} {m.depth:>12,} {m.quantum_cost:>14,} {m.t_count:>12,} {m.t_depth:>10,}")
    print()
    print(f"  Report saved to: {path}")
    print(f"  CSV saved to: {csv_path}")
    print_footer()
    return EXIT_OK


def cmd_fit(args) -> int:
    """Fit every metric of a saved sweep."""
    print_header(Path(args.sweep).name, "fit")
    points = points_from_report(load_report(args.sweep))

    fits, failed = {}, False
    for metric in METRIC_FAMILY:
        try:
            model = fit_metric(points, metric)
        except FitError as e:
            fits[metric] = {"error": str(e)}
            failed = True
            print(f"  {metric}: {e}")
            continue
        fits[metric] = fit_report(model)
        flag = "  (poor fit)" if model.poor else ""
        print(f"  {metric}: R²={model.r_squared:.5f}, max rel. error {model.max_relative_error:.2%}{flag}")

    path = _save(args, {"fits": fits}, "fit")
    print()
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_FAILED if failed else EXIT_OK


def cmd_extrapolate(args) -> int:
    """Extrapolate fitted models to the target dimensions."""
    print_header(Path(args.sweep).name, "extrapolate")
    points = points_from_report(load_report(args.sweep))
    targets = [int(v) for v in args.targets.split(",")]

    models = {
        metric: (fit_metric(points, metric), fit_metric(points, metric, per_iteration=True))
        for metric in METRIC_FAMILY
    }

    results = {}
    for n in targets:
        entry = {"reference": reference_cross_check(n)}
        for metric, (oracle_model, iteration_model) in models.items():
            result = extrapolate(oracle_model, n, per_iteration=iteration_model)
            entry[metric] = extrapolation_report(result)
            print(f"  n={n} {metric}: oracle {result.oracle_value:.4g}, Grover total 2^{result.log2_grover_total:.1f}")
        results[str(n)] = entry

    path = _save(args, {"targets": targets, "extrapolations": results}, "extrapolate")
    print()
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK


def cmd_bkz(args) -> int:
    """BKZ-reduce a basis file."""
    print_header(Path(args.basis).name, f"bkz-{args.beta} ({args.backend})")
    basis = read_basis(args.basis)
    cfg = BkzConfig(
        beta=args.beta,
        max_tours=args.max_tours,
        early_termination=TerminationPolicy(args.termination),
        delta=args.delta,
        seed=args.seed,
    )
    backend = Backend(args.backend)
    result = bkz_reduce(basis, cfg, backend)
    report = bkz_report(basis, result, cfg, backend)

    basis_path = write_basis(result.basis, Path(args.output_dir) / f"{Path(args.basis).stem}_bkz{args.beta}.txt")
    report["basis_file"] = str(basis_path)
    path = _save(args, report, "bkz")

    print(f"  Tours: {result.tours_executed}  SVP calls: {result.ledger.svp_calls}")
    print(f"  ‖b1‖²: {result.first_vector_norm_sq}")
    if report["quality_bound"] is not None:
        print(f"  Quality bound: {report['quality_bound']:.4f} (satisfied: {report['bound_satisfied']})")
    print()
    print(f"  Reduced basis saved to: {basis_path}")
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK


def cmd_crossover(args) -> int:
    """Blocksize crossover between classical enumeration and Grover search."""
    print_header("CROSSOVER", f"c={args.c:.4f}")
    extra = None
    if args.cost_fit:
        saved = load_report(args.cost_fit)
        model = FitModel.from_report(saved["fits"]["quantum_cost"] if "fits" in saved else saved)

        def extra(beta: float) -> float:
            return math.log2(max(model.predict(beta), 1.0))

    report = crossover_analysis(args.c, classical_beta=args.classical_beta, extra_log2=extra)
    path = _save(args, report, "crossover")

    print(f"  Classical beta {args.classical_beta} ~ quantum beta {report['equivalent_quantum_beta']:.1f}")
    print()
    print(f"  Report saved to: {path}")
    print_footer()
    return EXIT_OK


# =============================================================================
# Argument Parsing
# =============================================================================


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--output-dir", type=Path, default=config.REPORT_DIR)
    p.add_argument("--no-timestamp", action="store_true", help="Write <name>.json instead of timestamped files")


def _add_oracle_options(p: argparse.ArgumentParser):
    p.add_argument("basis", type=Path, help="Basis text file: 'n m' then n rows")
    bounds = p.add_mutually_exclusive_group()
    bounds.add_argument("--bounds", help="Explicit coefficient bounds d_i, comma separated")
    bounds.add_argument("--uniform-d", type=int, help="Same bound d for every coefficient")
    bounds.add_argument("--dual-a", type=float, help="Dual-basis bounds with scale A (default: Gaussian heuristic)")
    bounds.add_argument("--log-n", action="store_true", help="ceil(log2 n) bits per coefficient")
    threshold = p.add_mutually_exclusive_group()
    threshold.add_argument("--threshold-scale", type=float, default=1.0, help="T = scale x Gaussian heuristic")
    threshold.add_argument("--threshold-sq", type=float, help="Explicit T^2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svp-oracle", description="Grover oracle synthesis for SVP")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle-build", help="Synthesize an oracle")
    _add_oracle_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_oracle_build)

    p = sub.add_parser("oracle-verify", help="Exhaustively verify an oracle")
    _add_oracle_options(p)
    _add_common(p)
    p.add_argument("--mutate", type=int, help="Delete gate K before verifying")
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("grover", help="Plan a Grover search")
    _add_oracle_options(p)
    _add_common(p)
    p.add_argument("--solutions", "-M", type=int, default=config.DEFAULT_SOLUTION_COUNT)
    p.add_argument("--simulate", action="store_true", help="Statevector check of the success probability")
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("sweep", help="Oracle resource sweep")
    _add_common(p)
    p.add_argument("--dims", default=",".join(str(n) for n in config.DEFAULT_SWEEP_DIMS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="Seed for the random sweep bases")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="Fit a saved sweep")
    p.add_argument("sweep", type=Path)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("extrapolate", help="Extrapolate a saved sweep")
    p.add_argument("sweep", type=Path)
    _add_common(p)
    p.add_argument("--targets", default=",".join(str(n) for n in config.DEFAULT_EXTRAPOLATION_TARGETS))
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("bkz", help="BKZ-reduce a basis")
    p.add_argument("basis", type=Path)
    _add_common(p)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--max-tours", type=int, default=8)
    p.add_argument("--termination", choices=[t.value for t in TerminationPolicy], default="tour-budget")
    p.add_argument("--backend", choices=[b.value for b in Backend], default="classical")
    p.add_argument("--delta", type=float, default=config.DEFAULT_LLL_DELTA)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="Seed for Grover-costed block plans")
    p.set_defaults(func=cmd_bkz)

    p = sub.add_parser("crossover", help="Blocksize crossover analysis")
    _add_common(p)
    p.add_argument("--c", type=float, default=DEFAULT_ENUMERATION_CONSTANT)
    p.add_argument("--classical-beta", type=int, default=40)
    p.add_argument("--cost-fit", type=Path, help="Fit report of a per-iteration cost to add to the quantum exponent")
    p.set_defaults(func=cmd_crossover)

    return parser


def main(argv=None):
    """Main entry point."""
    setup_logging()
    args = build_parser().parse_args(argv)
    logger.info(f"Running {args.command}")

    try:
        code = args.func(args)
    except (InvalidBasisError, InvalidInputError, CircuitError, ValueError, OSError) as e:
        code = _fail(e, EXIT_INPUT)
    except ResourceCapError as e:
        code = _fail(e, EXIT_RESOURCE)
    except SvpOracleError as e:
        code = _fail(e, EXIT_FAILED)

    if code:
        sys.exit(code)


def _fail(e: Exception, code: int) -> int:
    logger.error(f"Command failed: {e}")
    print(f"\n  Error: {e}")
    print()
    return code


if __name__ == "__main__":
    main()
