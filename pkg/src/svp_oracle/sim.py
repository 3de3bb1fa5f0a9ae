"""
Simulators and classical checks.

- run_bitwise: exact permutation simulation of X/CX/CCX/MCX circuits on one basis state
- run_bitwise_batch: the same over many basis states at once, one numpy bit plane per qubit
- run_statevector: dense complex simulation of any circuit up to STATEVECTOR_MAX_QUBITS
- brute_force_svp / verify_oracle: exhaustive classical references for small instances
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from svp_oracle import config
from svp_oracle.circuit import Circuit, Gate, GateKind, RegisterKind
from svp_oracle.errors import ResourceCapError, SimulationError
from svp_oracle.lattice import LatticeBasis
from svp_oracle.oracle import CoefficientEncoding, OracleCircuit, pattern_lengths

logger = logging.getLogger(__name__)

# Patterns simulated per numpy batch
BATCH_PATTERNS = 1 << 14

_SQRT_HALF = 1 / math.sqrt(2)
_PHASES = {
    GateKind.Z: -1,
    GateKind.S: 1j,
    GateKind.SDG: -1j,
    GateKind.T: complex(_SQRT_HALF, _SQRT_HALF),
    GateKind.TDG: complex(_SQRT_HALF, -_SQRT_HALF),
}


# =============================================================================
# Basis States
# =============================================================================


@dataclass(frozen=True)
class BasisState:
    """Computational basis state; bit q of value is qubit q."""

    width: int
    value: int = 0

    def __post_init__(self):
        if self.value < 0 or self.value >> self.width:
            raise ValueError(f"Value {self.value} does not fit {self.width} qubits")

    @classmethod
    def from_bits(cls, bits) -> "BasisState":
        return cls(len(bits), sum(int(b) << i for i, b in enumerate(bits)))

    @property
    def bits(self) -> list[int]:
        return [self.value >> q & 1 for q in range(self.width)]

    def bit(self, q: int) -> int:
        return self.value >> q & 1


def encode_registers(circuit: Circuit, values: dict[str, int]) -> BasisState:
    """Basis state with the named registers set (negative values in two's complement)."""
    state = 0
    for name, value in values.items():
        reg = circuit.register(name)
        state |= (value % (1 << reg.width)) << reg.offset
    return BasisState(circuit.width, state)


def read_register(circuit: Circuit, state: BasisState, name: str, signed: bool = False) -> int:
    reg = circuit.register(name)
    value = state.value >> reg.offset & ((1 << reg.width) - 1)
    if signed and value >> (reg.width - 1):
        value -= 1 << reg.width
    return value


# =============================================================================
# Bitwise Simulation
# =============================================================================


def _require_classical(c: Circuit):
    if not c.is_classical:
        kinds = sorted({g.kind.value for g in c.gates} - {"x", "cx", "ccx", "mcx"})
        raise SimulationError(f"Bitwise simulation needs X/CX/CCX/MCX only, found {kinds}")


def run_bitwise(c: Circuit, state: BasisState) -> BasisState:
    """Apply a reversible classical circuit to one basis state."""
    _require_classical(c)
    if state.width != c.width:
        raise ValueError(f"State has {state.width} qubits, circuit has {c.width}")

    s = state.value
    for gate in c.gates:
        if all(s >> q & 1 for q in gate.controls):
            s ^= 1 << gate.target
    return BasisState(c.width, s)


def run_bitwise_batch(c: Circuit, planes: np.ndarray) -> np.ndarray:
    """Apply a classical circuit to planes[q, k] = bit q of pattern k, in place."""
    _require_classical(c)
    if planes.shape[0] != c.width:
        raise ValueError(f"Planes cover {planes.shape[0]} qubits, circuit has {c.width}")

    for gate in c.gates:
        if gate.kind == GateKind.X:
            np.logical_not(planes[gate.target], out=planes[gate.target])
        elif gate.kind == GateKind.CX:
            planes[gate.target] ^= planes[gate.controls[0]]
        elif gate.kind == GateKind.CCX:
            a, b = gate.controls
            planes[gate.target] ^= planes[a] & planes[b]
        else:
            planes[gate.target] ^= np.logical_and.reduce(planes[list(gate.controls)], axis=0)
    return planes


def pattern_planes(width: int, qubits, patterns: np.ndarray) -> np.ndarray:
    """Zero planes with the bits of each pattern written onto the given qubits."""
    planes = np.zeros((width, len(patterns)), dtype=bool)
    for bit, q in enumerate(qubits):
        planes[q] = (patterns >> bit) & 1
    return planes


# =============================================================================
# Statevector Simulation
# =============================================================================


def _index(n: int, fixed: dict[int, int]) -> tuple:
    # qubit q lives on tensor axis n-1-q so that flat indices equal basis values
    idx: list = [slice(None)] * n
    for q, v in fixed.items():
        idx[n - 1 - q] = v
    return tuple(idx)


def _apply_gate(psi: np.ndarray, n: int, gate: Gate):
    kind = gate.kind
    if kind in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
        ctrl = {q: 1 for q in gate.controls}
        lo = _index(n, {**ctrl, gate.target: 0})
        hi = _index(n, {**ctrl, gate.target: 1})
        psi[lo], psi[hi] = psi[hi].copy(), psi[lo].copy()
    elif kind == GateKind.H:
        q = gate.target
        lo, hi = _index(n, {q: 0}), _index(n, {q: 1})
        a, b = psi[lo].copy(), psi[hi].copy()
        psi[lo] = (a + b) * _SQRT_HALF
        psi[hi] = (a - b) * _SQRT_HALF
    elif kind == GateKind.CZ:
        psi[_index(n, {q: 1 for q in gate.qubits})] *= -1
    elif kind in _PHASES:
        psi[_index(n, {gate.target: 1})] *= _PHASES[kind]
    else:
        raise SimulationError(f"Unsupported gate {kind.value}")


def run_statevector(c: Circuit, initial=None, max_qubits: int | None = None) -> np.ndarray:
    """Dense simulation; initial is a BasisState, an amplitude vector or None for |0…0⟩."""
    max_qubits = config.STATEVECTOR_MAX_QUBITS if max_qubits is None else max_qubits
    n = c.width
    if n > max_qubits:
        raise ResourceCapError(f"Statevector of {n} qubits exceeds the {max_qubits}-qubit cap")

    if initial is None:
        psi = np.zeros(1 << n, dtype=np.complex128)
        psi[0] = 1
    elif isinstance(initial, BasisState):
        psi = np.zeros(1 << n, dtype=np.complex128)
        psi[initial.value] = 1
    else:
        psi = np.array(initial, dtype=np.complex128)
        if psi.shape != (1 << n,):
            raise ValueError(f"Initial amplitudes must have length {1 << n}")

    tensor = psi.reshape([2] * n)
    for gate in c.gates:
        _apply_gate(tensor, n, gate)
    return tensor.reshape(-1)


def probabilities(psi: np.ndarray) -> np.ndarray:
    return np.abs(psi) ** 2


# =============================================================================
# Classical References
# =============================================================================


@dataclass
class BruteForceResult:
    """Exhaustive search over the encoded coefficient box."""

    shortest_x: tuple[int, ...] | None
    length_sq: int | None
    patterns: int
    solution_count_leq_tau: int | None = None
    all_solutions: list[tuple[int, ...]] = field(default_factory=list)


def _pattern_chunks(total: int):
    for start in range(0, total, BATCH_PATTERNS):
        yield np.arange(start, min(start + BATCH_PATTERNS, total), dtype=np.int64)


def _check_box(encoding: CoefficientEncoding, cap: int):
    total = encoding.search_space.N
    if total > cap:
        raise ResourceCapError(f"Search space of {total} patterns exceeds the brute-force cap {cap}")
    return total


def brute_force_svp(
    basis: LatticeBasis,
    encoding: CoefficientEncoding,
    tau: int | None = None,
    cap: int | None = None,
    collect: bool = False,
) -> BruteForceResult:
    """Shortest nonzero vector in the box, and with tau the count of x (zero included) with ‖xB‖² ≤ tau."""
    cap = config.BRUTE_FORCE_CAP if cap is None else cap
    total = _check_box(encoding, cap)

    best_x, best_len = None, None
    count = 0 if tau is not None else None
    solutions = []
    for patterns in _pattern_chunks(total):
        lengths = pattern_lengths(basis, encoding, patterns)
        nonzero = lengths > 0
        if nonzero.any():
            masked = np.where(nonzero, lengths, lengths.max() + 1)
            k = int(np.argmin(masked))
            if best_len is None or masked[k] < best_len:
                best_len = int(masked[k])
                best_x = encoding.decode_pattern(int(patterns[k]))
        if tau is not None:
            hits = lengths <= tau
            count += int(hits.sum())
            if collect:
                solutions.extend(encoding.decode_pattern(int(p)) for p in patterns[hits])

    logger.debug(f"Brute force over {total} patterns: shortest {best_len}, solutions {count}")
    return BruteForceResult(best_x, best_len, total, count, solutions)


@dataclass
class VerificationReport:
    patterns_checked: int
    failures: int
    ancilla_violations: int
    input_preservation_violations: int
    first_counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return not (self.failures or self.ancilla_violations or self.input_preservation_violations)


def _oracle_planes(oracle: OracleCircuit, circuit: Circuit, patterns: np.ndarray) -> np.ndarray:
    planes = pattern_planes(circuit.width, oracle.input_qubits, patterns)
    return run_bitwise_batch(circuit, planes)


def verify_oracle(oracle: OracleCircuit, circuit: Circuit | None = None, cap_bits: int | None = None) -> VerificationReport:
    """Exhaustively compare the oracle (or a variant of its circuit) with the classical predicate."""
    cap_bits = config.EXHAUSTION_BITS if cap_bits is None else cap_bits
    circuit = circuit or oracle.circuit
    bits = oracle.encoding.total_input_bits
    if bits > cap_bits:
        raise ResourceCapError(f"Exhaustive verification over {bits} input bits exceeds the {cap_bits}-bit cap")

    inputs = oracle.input_qubits
    y = oracle.output_qubit
    ancillas = circuit.qubits_of(RegisterKind.ANCILLA)
    report = VerificationReport(0, 0, 0, 0)

    for patterns in _pattern_chunks(1 << bits):
        planes = _oracle_planes(oracle, circuit, patterns)
        expected = pattern_lengths(oracle.basis, oracle.encoding, patterns) <= oracle.threshold.tau
        expected = expected.astype(bool)
        wrong = planes[y] != expected
        dirty = planes[ancillas].any(axis=0) if ancillas else np.zeros(len(patterns), dtype=bool)
        moved = (pattern_planes(circuit.width, inputs, patterns)[inputs] != planes[inputs]).any(axis=0)

        report.patterns_checked += len(patterns)
        report.failures += int(wrong.sum())
        report.ancilla_violations += int(dirty.sum())
        report.input_preservation_violations += int(moved.sum())

        bad = wrong | dirty | moved
        if report.first_counterexample is None and bad.any():
            k = int(np.argmax(bad))
            report.first_counterexample = {
                "pattern": int(patterns[k]),
                "x": list(oracle.encoding.decode_pattern(int(patterns[k]))),
                "expected": int(expected[k]),
                "got": int(planes[y][k]),
                "ancillas_clean": not bool(dirty[k]),
                "inputs_preserved": not bool(moved[k]),
            }

    if report.passed:
        logger.info(f"Oracle verified on {report.patterns_checked} patterns")
    else:
        logger.warning(
            f"Oracle verification failed: {report.failures} wrong outputs, "
            f"{report.ancilla_violations} dirty ancillas, {report.input_preservation_violations} altered inputs"
        )
    return report


def oracle_truth_table(oracle: OracleCircuit, cap_bits: int | None = None) -> np.ndarray:
    """Output bit of the synthesized oracle for every input pattern, by exact bitwise simulation."""
    cap_bits = config.EXHAUSTION_BITS if cap_bits is None else cap_bits
    bits = oracle.encoding.total_input_bits
    if bits > cap_bits:
        raise ResourceCapError(f"Truth table over {bits} input bits exceeds the {cap_bits}-bit cap")
    table = np.zeros(1 << bits, dtype=bool)
    for patterns in _pattern_chunks(1 << bits):
        table[patterns] = _oracle_planes(oracle, oracle.circuit, patterns)[oracle.output_qubit]
    return table
