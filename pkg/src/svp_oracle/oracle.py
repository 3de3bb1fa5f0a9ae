"""
Grover oracle synthesis for the shortest vector problem.

The oracle flips its output qubit y exactly when the coefficient bits c
decode to a lattice vector of squared length at most tau:

    x_i = c_i − d_i,   y ^= [ Σ_j (Σ_i x_i·B_ij)² ≤ tau ]

Stages: decode, constant multipliers, per-column tree sums, squarers, outer
tree sum, comparator, then the inverse of everything before the comparator.
"""

import logging
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum

import numpy as np

from svp_oracle.arith import (
    WidthPlan,
    emit_const_multiply,
    emit_leq_const,
    emit_square,
    emit_sub,
    emit_tree_sum,
    plan_widths,
)
from svp_oracle.circuit import Circuit, CircuitBuilder, RegisterKind, ResourceMetrics, metrics
from svp_oracle.lattice import LatticeBasis, dot, dual_basis, dual_rows, gaussian_heuristic, vector_length_sq
from svp_oracle.reports import metrics_to_dict

logger = logging.getLogger(__name__)


# =============================================================================
# Data Models
# =============================================================================


class BoundMethod(str, Enum):
    EXPLICIT = "explicit"
    UNIFORM = "uniform"
    DUAL_BASIS = "dual-basis"
    LOG_N = "log-n"


class ThresholdSource(str, Enum):
    GAUSSIAN_HEURISTIC = "gaussian-heuristic"
    SCALED_GH = "scaled-gh"
    EXPLICIT = "explicit"


def coeff_bits_for(d: int) -> int:
    """⌊log₂(2d)⌋ + 1."""
    return (2 * d).bit_length()


@dataclass(frozen=True)
class CoefficientEncoding:
    """Per-coordinate bounds d_i and bit widths w_i; x_i = c_i − d_i."""

    d: tuple[int, ...]
    w: tuple[int, ...]
    method: BoundMethod = BoundMethod.EXPLICIT

    def __post_init__(self):
        if len(self.d) != len(self.w):
            raise ValueError("Bounds and widths must have the same length")
        if any(di < 1 for di in self.d):
            raise ValueError(f"Coefficient bounds must be positive, got {self.d}")
        if any(wi < 1 for wi in self.w):
            raise ValueError(f"Coefficient widths must be positive, got {self.w}")

    @classmethod
    def from_bounds(cls, d, method: BoundMethod = BoundMethod.EXPLICIT) -> "CoefficientEncoding":
        d = tuple(int(v) for v in d)
        if any(v < 1 for v in d):
            raise ValueError(f"Coefficient bounds must be positive, got {d}")
        return cls(d, tuple(coeff_bits_for(v) for v in d), method)

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def ranges(self) -> list[tuple[int, int]]:
        return [(-di, (1 << wi) - 1 - di) for di, wi in zip(self.d, self.w)]

    @property
    def offsets(self) -> list[int]:
        return [sum(self.w[:i]) for i in range(self.n)]

    @property
    def total_input_bits(self) -> int:
        return sum(self.w)

    @property
    def search_space(self) -> "SearchSpace":
        return SearchSpace(self.total_input_bits, 1 << self.total_input_bits, self.method)

    def decode_pattern(self, pattern: int) -> tuple[int, ...]:
        """Coefficients encoded by the little-endian input bit pattern."""
        return tuple(
            ((pattern >> off) & ((1 << wi) - 1)) - di for off, wi, di in zip(self.offsets, self.w, self.d)
        )

    def decode(self, bits) -> tuple[int, ...]:
        if len(bits) != self.total_input_bits:
            raise ValueError(f"Expected {self.total_input_bits} bits, got {len(bits)}")
        return self.decode_pattern(sum(int(b) << i for i, b in enumerate(bits)))

    def decode_patterns(self, patterns: np.ndarray) -> np.ndarray:
        """Vectorized decode; returns an array of shape (len(patterns), n)."""
        patterns = np.asarray(patterns, dtype=np.int64)
        columns = [((patterns >> off) & ((1 << wi) - 1)) - di for off, wi, di in zip(self.offsets, self.w, self.d)]
        return np.stack(columns, axis=1)


@dataclass(frozen=True)
class SearchSpace:
    total_input_bits: int
    N: int
    bound_method: BoundMethod


@dataclass(frozen=True)
class Threshold:
    T: float
    tau: int
    source: ThresholdSource

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"Threshold tau must be nonnegative, got {self.tau}")


@dataclass(frozen=True)
class OracleCircuit:
    """Synthesized oracle; basis holds the rows actually used (first column made nonnegative)."""

    circuit: Circuit
    encoding: CoefficientEncoding
    threshold: Threshold
    width_plan: WidthPlan
    basis: LatticeBasis
    negated_rows: tuple[int, ...]

    @property
    def input_qubits(self) -> list[int]:
        return [q for i in range(self.encoding.n) for q in self.circuit.register(f"c{i}").indices]

    @property
    def output_qubit(self) -> int:
        return self.circuit.register("y").offset

    @property
    def ancilla_qubits(self) -> list[int]:
        return self.circuit.qubits_of(RegisterKind.ANCILLA)


# =============================================================================
# Bounds and Threshold
# =============================================================================


def _norm(row) -> Decimal:
    value = dot(row, row)
    return (Decimal(value.numerator) / Decimal(value.denominator)).sqrt()


def _scaled_norms(dual, radius: float) -> list[int]:
    with localcontext() as ctx:
        ctx.prec = 40
        scale = Decimal(repr(float(radius)))
        return [max(1, math.ceil(scale * _norm(row))) for row in dual]


def dual_norm_bounds(rows, radius: float) -> list[int]:
    """d_i = max(1, ⌈radius·‖b̂_i‖⌉) from the dual of arbitrary independent rational rows."""
    return _scaled_norms(dual_rows(rows), radius)


def log_n_encoding(n: int) -> CoefficientEncoding:
    """⌈log₂ n⌉ bits per coordinate (at least one), decoding to [−2^(w−1), 2^(w−1)−1]."""
    w = max(1, (n - 1).bit_length())
    return CoefficientEncoding((1 << (w - 1),) * n, (w,) * n, BoundMethod.LOG_N)


def derive_bounds(basis: LatticeBasis, method: BoundMethod, value=None) -> CoefficientEncoding:
    """Coefficient bounds by explicit list, uniform d, dual-basis scaling A, or log-n sizing."""
    method = BoundMethod(method)
    if method == BoundMethod.EXPLICIT:
        d = tuple(value)
        if len(d) != basis.n:
            raise ValueError(f"Expected {basis.n} explicit bounds, got {len(d)}")
        return CoefficientEncoding.from_bounds(d, method)
    if method == BoundMethod.UNIFORM:
        return CoefficientEncoding.from_bounds((int(value),) * basis.n, method)
    if method == BoundMethod.LOG_N:
        return log_n_encoding(basis.n)

    dual = dual_basis(basis)
    radius = gaussian_heuristic(basis) if value is None else float(value)
    if radius <= 0:
        raise ValueError(f"Dual-basis scale must be positive, got {radius}")
    return CoefficientEncoding.from_bounds(_scaled_norms(dual, radius), method)


def choose_threshold(
    basis: LatticeBasis,
    source: ThresholdSource = ThresholdSource.GAUSSIAN_HEURISTIC,
    scale: float = 1.0,
    t_sq=None,
) -> Threshold:
    """T = scale·gh(L) or an explicit T²; tau = ⌊T²⌋."""
    source = ThresholdSource(source)
    if source == ThresholdSource.EXPLICIT:
        if t_sq is None or t_sq < 0:
            raise ValueError("Explicit threshold needs a nonnegative T²")
        return Threshold(math.sqrt(t_sq), math.floor(t_sq), source)

    if scale < 1:
        raise ValueError(f"Gaussian-heuristic scale must be >= 1, got {scale}")
    T = scale * gaussian_heuristic(basis)
    if scale != 1:
        source = ThresholdSource.SCALED_GH
    return Threshold(T, math.floor(T * T), source)


def classical_predicate(basis: LatticeBasis, encoding: CoefficientEncoding, threshold: Threshold, bits) -> int:
    """1 iff the decoded coefficient vector has squared length ≤ tau."""
    x = encoding.decode(bits)
    return int(vector_length_sq(basis, x) <= threshold.tau)


def pattern_lengths(basis: LatticeBasis, encoding: CoefficientEncoding, patterns: np.ndarray) -> np.ndarray:
    """Squared lengths for an array of input patterns."""
    xs = encoding.decode_patterns(patterns)
    rows = np.array(basis.rows, dtype=object if _needs_big_ints(basis, encoding) else np.int64)
    vectors = xs.astype(rows.dtype) @ rows
    return (vectors * vectors).sum(axis=1)


def _needs_big_ints(basis: LatticeBasis, encoding: CoefficientEncoding) -> bool:
    biggest = max(max(abs(lo), abs(hi)) for lo, hi in encoding.ranges)
    column = max(sum(abs(row[j]) for row in basis.rows) for j in range(basis.m))
    return (biggest * column) ** 2 * basis.m >= 1 << 62


def qubit_requirement_bound(n: int) -> float:
    """(3/2)·n·log₂ n − 2.26·n, the HKZ-based qubit bound without its O(log n) slack."""
    if n < 2:
        raise ValueError("Qubit requirement bound needs n >= 2")
    return 1.5 * n * math.log2(n) - 2.26 * n


# =============================================================================
# Synthesis
# =============================================================================


def normalize_rows(rows) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Negate rows whose first entry is negative; returns rows and negated indices."""
    negated = tuple(i for i, row in enumerate(rows) if row[0] < 0)
    fixed = tuple(tuple(-v for v in row) if i in negated else tuple(row) for i, row in enumerate(rows))
    return fixed, negated


def synthesize_oracle(basis: LatticeBasis, encoding: CoefficientEncoding, threshold: Threshold) -> OracleCircuit:
    if encoding.n != basis.n:
        raise ValueError(f"Encoding covers {encoding.n} coefficients, basis has {basis.n} rows")

    rows, negated = normalize_rows(basis.rows)
    n, m = basis.n, basis.m
    plan = plan_widths(rows, encoding.w, encoding.ranges)
    operand_width = plan.operand_width
    outer_width = plan.outer_sum_width

    cb = CircuitBuilder()
    inputs = [cb.allocate(f"c{i}", w, RegisterKind.INPUT) for i, w in enumerate(encoding.w)]
    y = cb.allocate("y", 1, RegisterKind.OUTPUT)[0]
    xs = [cb.allocate(f"x{i}", operand_width) for i in range(n)]
    dconst = cb.allocate("dconst", operand_width)
    dcarry = cb.allocate("dcarry", 1)[0]
    mcarry = cb.allocate("mcarry", n)

    products: dict[int, list[tuple[int, list[int]]]] = {}
    for j in range(m):
        for i in range(n):
            if rows[i][j]:
                products.setdefault(j, []).append((i, cb.allocate(f"p{i}_{j}", plan.inner_sum_width[j])))
    columns = sorted(products)

    tcarry = {j: cb.allocate(f"tcarry{j}", len(products[j]) // 2) for j in columns if len(products[j]) > 1}
    squares = {j: cb.allocate(f"sq{j}", outer_width) for j in columns}
    masks = {j: cb.allocate(f"mask{j}", 2 * plan.inner_sum_width[j]) for j in columns}
    sqcarry = {j: cb.allocate(f"sqcarry{j}", 1)[0] for j in columns}
    ocarry = cb.allocate("ocarry", len(columns) // 2) if len(columns) > 1 else []
    scratch = cb.allocate("cmp_scratch", outer_width + 1)
    const = cb.allocate("cmp_const", outer_width + 1)
    ccarry = cb.allocate("cmp_carry", 1)[0]

    forward_start = len(cb.gates)

    # decode x_i = c_i − d_i into sign-extended registers
    for i, c in enumerate(inputs):
        for src, dst in zip(c, xs[i]):
            cb.cx(src, dst)
        loaded = [q for b, q in enumerate(dconst) if encoding.d[i] >> b & 1]
        for q in loaded:
            cb.x(q)
        emit_sub(cb, dconst, xs[i], dcarry)
        for q in loaded:
            cb.x(q)

    for j in columns:
        for i, reg in products[j]:
            emit_const_multiply(cb, xs[i], reg, rows[i][j], mcarry[i])

    sums = {j: emit_tree_sum(cb, [reg for _, reg in products[j]], tcarry.get(j, [])) for j in columns}

    for j in columns:
        emit_square(cb, sums[j], squares[j][: 2 * len(sums[j])], masks[j], sqcarry[j])

    total = emit_tree_sum(cb, [squares[j] for j in columns], ocarry)
    forward_stop = len(cb.gates)

    tau = threshold.tau
    if tau >= 1 << outer_width:
        logger.warning(f"tau {tau} above every representable length; clamping to {(1 << outer_width) - 1}")
        tau = (1 << outer_width) - 1
    emit_leq_const(cb, total, y, tau, scratch, const, ccarry)
    cb.uncompute(forward_start, forward_stop)

    circuit = cb.build()
    logger.info(
        f"Synthesized oracle for {n}x{m} basis: {circuit.width} qubits, {len(circuit.gates)} gates, tau={threshold.tau}"
    )
    return OracleCircuit(
        circuit=circuit,
        encoding=encoding,
        threshold=threshold,
        width_plan=plan,
        basis=LatticeBasis(rows),
        negated_rows=negated,
    )


# =============================================================================
# Reporting
# =============================================================================


def oracle_report(oracle: OracleCircuit, gate_metrics: ResourceMetrics | None = None) -> dict:
    """JSON-ready description of a synthesized oracle."""
    gate_metrics = gate_metrics or metrics(oracle.circuit)
    block_metrics = metrics(oracle.circuit, costing="blocks")
    space = oracle.encoding.search_space
    n = oracle.basis.n
    return {
        "n": n,
        "m": oracle.basis.m,
        "bounds": list(oracle.encoding.d),
        "widths": list(oracle.encoding.w),
        "bound_method": oracle.encoding.method.value,
        "total_input_bits": space.total_input_bits,
        "N": str(space.N),
        "T": oracle.threshold.T,
        "tau": oracle.threshold.tau,
        "threshold_source": oracle.threshold.source.value,
        "negated_rows": list(oracle.negated_rows),
        "qubit_requirement_bound": qubit_requirement_bound(n) if n >= 2 else None,
        "metrics": metrics_to_dict(gate_metrics),
        "block_metrics": metrics_to_dict(block_metrics),
    }
