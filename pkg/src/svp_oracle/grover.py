"""
Grover search assembly and planning.

The output qubit is prepared in |−⟩ so the oracle's bit flip acts as a phase
flip; each iteration is the oracle followed by the diffusion reflection on
the input qubits.
"""

import logging
import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext

import numpy as np

from svp_oracle import config
from svp_oracle.circuit import (
    MCX_SCRATCH,
    Circuit,
    CircuitBuilder,
    GateKind,
    RegisterKind,
    ResourceMetrics,
    metrics,
)
from svp_oracle.errors import CircuitError, ResourceCapError, SimulationError
from svp_oracle.oracle import OracleCircuit
from svp_oracle.reports import metrics_to_dict
from svp_oracle.sim import oracle_truth_table, probabilities, run_statevector

logger = logging.getLogger(__name__)

_PI = Decimal("3.14159265358979323846264338327950288419716939937510")

# Explicit gate lists are only emitted for simulation-sized searches
MAX_EMITTED_ITERATIONS = 1 << 12


# =============================================================================
# Data Models
# =============================================================================


@dataclass(frozen=True)
class GroverPlan:
    N: int
    M: int
    iterations: int
    preparation: ResourceMetrics
    per_iteration: ResourceMetrics
    totals: ResourceMetrics

    @property
    def success_probability(self) -> float:
        return success_probability(self.N, self.M, self.iterations)


@dataclass
class GroverSimulation:
    """Statevector run of an assembled search, measured on the input register."""

    mode: str  # "circuit" or "ideal-oracle"
    N: int
    M_true: int
    iterations: int
    width: int
    measured: float
    predicted: float
    distribution: np.ndarray


# =============================================================================
# Planning
# =============================================================================


def iteration_count(N: int, M: int) -> int:
    """⌈(π/4)·√(N/M)⌉ with enough precision for N far beyond float range."""
    if M < 1:
        raise ValueError("Solution count M must be at least 1")
    if M > N:
        raise ValueError(f"Solution count {M} exceeds search space {N}")
    with localcontext() as ctx:
        ctx.prec = max(50, len(str(N)) + 30)
        value = _PI / 4 * (Decimal(N) / Decimal(M)).sqrt()
        return int(value.to_integral_value(rounding=ROUND_CEILING))


def dimension_iterations(n: int, M: int = config.DEFAULT_SOLUTION_COUNT) -> int:
    """Iterations for an n-dimensional search with ⌈log₂ n⌉ bits per coefficient."""
    return iteration_count(1 << (n * (n - 1).bit_length()), M)


def success_probability(N: int, M: int, k: int) -> float:
    """sin²((2k+1)·arcsin √(M/N))."""
    if not 1 <= M <= N:
        raise ValueError(f"Need 1 <= M <= N, got M={M}, N={N}")
    if k < 0:
        raise ValueError("Iteration count must be nonnegative")
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * k + 1) * theta) ** 2


# =============================================================================
# Circuit Assembly
# =============================================================================


def _emit_mcz(cb: CircuitBuilder, qubits):
    *controls, target = qubits
    if not controls:
        cb.add(GateKind.Z, target)
        return
    cb.add(GateKind.H, target)
    cb.mcx(controls, target)
    cb.add(GateKind.H, target)


def emit_diffusion(cb: CircuitBuilder, qubits):
    """H, X, multi-controlled Z, X, H over the given qubits."""
    for q in qubits:
        cb.add(GateKind.H, q)
    for q in qubits:
        cb.x(q)
    _emit_mcz(cb, qubits)
    for q in qubits:
        cb.x(q)
    for q in qubits:
        cb.add(GateKind.H, q)


def _ensure_scratch(cb: CircuitBuilder, needed: int):
    if needed <= 0:
        return
    existing = next((r for r in cb.registers if r.name == MCX_SCRATCH), None)
    if existing is None:
        cb.allocate(MCX_SCRATCH, needed)
    elif existing.width < needed:
        raise CircuitError(f"{MCX_SCRATCH} has {existing.width} qubits, {needed} needed")


def build_diffusion(input_bits: int) -> Circuit:
    if input_bits < 1:
        raise ValueError("Diffusion needs at least one input bit")
    cb = CircuitBuilder()
    qubits = cb.allocate("c", input_bits, RegisterKind.INPUT)
    _ensure_scratch(cb, input_bits - 3)
    emit_diffusion(cb, qubits)
    return cb.build()


def build_ideal_oracle(input_bits: int, table: np.ndarray, scratch: bool = True) -> Circuit:
    """Phase-kickback oracle flipping y on exactly the patterns marked in table."""
    cb = CircuitBuilder()
    inputs = cb.allocate("c", input_bits, RegisterKind.INPUT)
    y = cb.allocate("y", 1, RegisterKind.OUTPUT)[0]
    if scratch:
        _ensure_scratch(cb, input_bits - 2)

    for pattern in np.flatnonzero(table):
        zeros = [q for b, q in enumerate(inputs) if not int(pattern) >> b & 1]
        for q in zeros:
            cb.x(q)
        cb.mcx(inputs, y)
        for q in zeros:
            cb.x(q)
    return cb.build()


def _append(cb: CircuitBuilder, c: Circuit):
    base = len(cb.gates)
    cb.extend(c.gates)
    cb.blocks.extend(b.shifted(base) for b in c.blocks)


def _frame(oracle_circuit: Circuit, inputs, scratch: bool) -> CircuitBuilder:
    cb = CircuitBuilder.extending(oracle_circuit, gates=False)
    if scratch:
        _ensure_scratch(cb, len(inputs) - 3)
    return cb


def _emit_preparation(cb: CircuitBuilder, inputs, y: int):
    cb.x(y)
    cb.add(GateKind.H, y)
    for q in inputs:
        cb.add(GateKind.H, q)


def build_preparation(oracle_circuit: Circuit, inputs, y: int, scratch: bool = True) -> Circuit:
    cb = _frame(oracle_circuit, inputs, scratch)
    _emit_preparation(cb, inputs, y)
    return cb.build()


def assemble_circuit(oracle_circuit: Circuit, inputs, y: int, iterations: int, scratch: bool = True) -> Circuit:
    """Preparation, then iterations × (oracle; diffusion)."""
    if iterations > MAX_EMITTED_ITERATIONS:
        raise ResourceCapError(f"Refusing to emit {iterations} Grover iterations (cap {MAX_EMITTED_ITERATIONS})")
    cb = _frame(oracle_circuit, inputs, scratch)
    _emit_preparation(cb, inputs, y)
    for _ in range(iterations):
        _append(cb, oracle_circuit)
        emit_diffusion(cb, inputs)
    return cb.build()


def plan_search(
    oracle_circuit: Circuit,
    inputs,
    y: int,
    N: int,
    M: int,
    oracle_metrics: ResourceMetrics | None = None,
) -> GroverPlan:
    """Totals = preparation + k·(oracle + diffusion), all on the same qubits."""
    k = iteration_count(N, M)
    prep = _frame(oracle_circuit, inputs, scratch=True)
    _emit_preparation(prep, inputs, y)
    diffusion = _frame(oracle_circuit, inputs, scratch=True)
    emit_diffusion(diffusion, inputs)

    oracle_metrics = oracle_metrics or metrics(oracle_circuit)
    oracle_metrics = ResourceMetrics(prep.width, *_without_width(oracle_metrics))
    per_iteration = oracle_metrics.then(metrics(diffusion.build()))
    preparation = metrics(prep.build())
    totals = preparation.then(per_iteration.repeated(k))
    return GroverPlan(N=N, M=M, iterations=k, preparation=preparation, per_iteration=per_iteration, totals=totals)


def _without_width(m: ResourceMetrics) -> tuple[int, int, int, int]:
    return m.depth, m.quantum_cost, m.t_count, m.t_depth


def assemble_grover(
    oracle: OracleCircuit,
    M: int = config.DEFAULT_SOLUTION_COUNT,
    emit: bool = True,
    oracle_metrics: ResourceMetrics | None = None,
) -> tuple[Circuit | None, GroverPlan]:
    """Grover circuit around a synthesized oracle and its resource plan.

    With emit=False only the plan is computed, which is how sweeps price
    searches whose iteration count is astronomically large.
    """
    N = oracle.encoding.search_space.N
    plan = plan_search(oracle.circuit, oracle.input_qubits, oracle.output_qubit, N, M, oracle_metrics)
    circuit = None
    if emit:
        circuit = assemble_circuit(oracle.circuit, oracle.input_qubits, oracle.output_qubit, plan.iterations)
    logger.info(f"Grover plan: N=2^{N.bit_length() - 1}, M={M}, k={plan.iterations}")
    return circuit, plan


# =============================================================================
# Simulation
# =============================================================================


def _input_distribution(psi: np.ndarray, input_bits: int) -> np.ndarray:
    # input qubits occupy the lowest positions of every basis index
    index = np.arange(len(psi)) & ((1 << input_bits) - 1)
    return np.bincount(index, weights=probabilities(psi), minlength=1 << input_bits)


def simulate_grover(oracle: OracleCircuit, iterations: int | None = None, max_qubits: int | None = None) -> GroverSimulation:
    """Run the search on a statevector and measure the input register.

    The synthesized oracle is simulated directly when it fits the qubit cap;
    otherwise its truth table is compiled into an ideal phase oracle.
    """
    max_qubits = config.STATEVECTOR_MAX_QUBITS if max_qubits is None else max_qubits
    bits = oracle.encoding.total_input_bits
    table = oracle_truth_table(oracle)
    marked = int(table.sum())
    if marked == 0:
        raise SimulationError("Oracle marks no input pattern; nothing to amplify")

    N = 1 << bits
    k = iteration_count(N, marked) if iterations is None else iterations

    if oracle.circuit.width <= max_qubits:
        mode = "circuit"
        circuit = assemble_circuit(oracle.circuit, oracle.input_qubits, oracle.output_qubit, k, scratch=False)
    elif bits + 1 <= max_qubits:
        mode = "ideal-oracle"
        ideal = build_ideal_oracle(bits, table, scratch=False)
        circuit = assemble_circuit(ideal, list(range(bits)), bits, k, scratch=False)
    else:
        raise ResourceCapError(f"{bits} input bits plus output exceed the {max_qubits}-qubit statevector cap")

    logger.info(f"Simulating Grover ({mode}) on {circuit.width} qubits, k={k}")
    distribution = _input_distribution(run_statevector(circuit, max_qubits=max_qubits), bits)
    return GroverSimulation(
        mode=mode,
        N=N,
        M_true=marked,
        iterations=k,
        width=circuit.width,
        measured=float(distribution[table].sum()),
        predicted=success_probability(N, marked, k),
        distribution=distribution,
    )


def plan_report(plan: GroverPlan) -> dict:
    return {
        "N": str(plan.N),
        "M": plan.M,
        "k": str(plan.iterations),
        "success_probability": plan.success_probability,
        "preparation": metrics_to_dict(plan.preparation),
        "per_iteration": metrics_to_dict(plan.per_iteration),
        "totals": metrics_to_dict(plan.totals),
    }
