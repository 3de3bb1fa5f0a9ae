"""
Reversible integer arithmetic.

Every block is built from X/CX/CCX gates on little-endian qubit lists. Signed
values use two's complement throughout. Adders follow the ripple-carry
majority/unmajority chain with one clean carry qubit; subtraction uses
b − a = ¬(¬b + a). Adder-family calls are annotated as blocks so circuits can
also be scheduled under the block costing convention, and the closed forms
below give the exact gate-level cost of the standalone builders.
"""

import logging
from contextlib import nullcontext
from dataclasses import dataclass
from enum import Enum

from svp_oracle.circuit import Circuit, CircuitBuilder, RegisterKind
from svp_oracle.errors import WidthPlanOverflowError

logger = logging.getLogger(__name__)


# =============================================================================
# Block Cost Formulas
# =============================================================================


@dataclass(frozen=True)
class BlockCost:
    quantum_cost: int
    delay: int
    ancillas: int


def adder_cost(width: int) -> BlockCost:
    """N-bit adder with carry-out: N MAJ, one CX, N UMA and one clean carry qubit."""
    return BlockCost(14 * width + 1, 13 * width + 2, 1)


def subtractor_cost(width: int) -> BlockCost:
    """Adder wrapped in X on the N+1 result qubits."""
    return BlockCost(16 * width + 3, 13 * width + 4, 1)


def ctrl_addsub_cost(width: int) -> BlockCost:
    """Adder wrapped in a CX fan-out from the control onto the N+1 result qubits."""
    return BlockCost(16 * width + 3, 14 * width + 4, 1)


# =============================================================================
# Register Specs and Width Planning
# =============================================================================


class Signedness(str, Enum):
    UNSIGNED = "unsigned"
    TWOS_COMPLEMENT = "twos-complement"


@dataclass(frozen=True)
class IntRegisterSpec:
    width: int
    signedness: Signedness = Signedness.TWOS_COMPLEMENT

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("Register width must be >= 1")

    @property
    def is_signed(self) -> bool:
        return self.signedness == Signedness.TWOS_COMPLEMENT

    @property
    def value_range(self) -> tuple[int, int]:
        if self.is_signed:
            return -(1 << (self.width - 1)), (1 << (self.width - 1)) - 1
        return 0, (1 << self.width) - 1


def clog2(k: int) -> int:
    """⌈log₂ k⌉ for k ≥ 1."""
    return (k - 1).bit_length()


def fits_signed(lo: int, hi: int, width: int) -> bool:
    return -(1 << (width - 1)) <= lo and hi <= (1 << (width - 1)) - 1


@dataclass(frozen=True)
class WidthPlan:
    """Register widths of every oracle stage."""

    coeff_bits: tuple[int, ...]
    x_width: tuple[int, ...]
    product_width: tuple[tuple[int, ...], ...]
    inner_sum_width: tuple[int, ...]
    square_width: int
    outer_sum_width: int

    @property
    def comparator_width(self) -> int:
        return self.outer_sum_width + 1

    @property
    def operand_width(self) -> int:
        """Width of the sign-extended coefficient registers feeding the multipliers."""
        return max(self.inner_sum_width)


def plan_widths(rows, coeff_bits, decoded_ranges) -> WidthPlan:
    """Plan widths for Σ_j (Σ_i x_i·B_ij)² and check them by interval arithmetic."""
    n, m = len(rows), len(rows[0])
    x_width = tuple(w + 1 for w in coeff_bits)
    product_width = tuple(tuple(x_width[i] + abs(rows[i][j]).bit_length() for j in range(m)) for i in range(n))
    inner = tuple(max(product_width[i][j] for i in range(n)) + clog2(n) for j in range(m))
    square_width = 2 * max(inner)
    plan = WidthPlan(
        coeff_bits=tuple(coeff_bits),
        x_width=x_width,
        product_width=product_width,
        inner_sum_width=inner,
        square_width=square_width,
        outer_sum_width=square_width + clog2(m),
    )
    check_plan(plan, rows, decoded_ranges)
    return plan


def check_plan(plan: WidthPlan, rows, decoded_ranges):
    """Raise WidthPlanOverflowError if any intermediate value can leave its register."""
    n, m = len(rows), len(rows[0])
    outer_hi = 0

    for i, (lo, hi) in enumerate(decoded_ranges):
        if not fits_signed(lo, hi, plan.x_width[i]):
            raise WidthPlanOverflowError(f"Coefficient x_{i} range [{lo}, {hi}] exceeds {plan.x_width[i]} bits")

    for j in range(m):
        col_lo = col_hi = 0
        for i, (lo, hi) in enumerate(decoded_ranges):
            ends = (rows[i][j] * lo, rows[i][j] * hi)
            if not fits_signed(min(ends), max(ends), plan.product_width[i][j]):
                raise WidthPlanOverflowError(f"Product x_{i}*B[{i}][{j}] exceeds {plan.product_width[i][j]} bits")
            col_lo += min(ends)
            col_hi += max(ends)
        if not fits_signed(col_lo, col_hi, plan.inner_sum_width[j]):
            raise WidthPlanOverflowError(f"Column {j} sum range [{col_lo}, {col_hi}] exceeds {plan.inner_sum_width[j]} bits")
        square_hi = max(col_lo * col_lo, col_hi * col_hi)
        if square_hi >= 1 << plan.square_width:
            raise WidthPlanOverflowError(f"Column {j} square {square_hi} exceeds {plan.square_width} bits")
        outer_hi += square_hi

    if outer_hi >= 1 << plan.outer_sum_width:
        raise WidthPlanOverflowError(f"Squared length {outer_hi} exceeds {plan.outer_sum_width} bits")


# =============================================================================
# Gate Emitters
# =============================================================================


def _maj(cb: CircuitBuilder, c: int, b: int, a: int):
    cb.cx(a, b)
    cb.cx(a, c)
    cb.ccx(c, b, a)


def _uma(cb: CircuitBuilder, c: int, b: int, a: int):
    cb.ccx(c, b, a)
    cb.cx(a, c)
    cb.cx(c, b)


def emit_add(cb: CircuitBuilder, a, b, carry: int, carry_out: int | None = None, annotate: bool = True):
    """b ← a + b modulo 2^len(b); with carry_out the carry lands there instead of wrapping.

    The carry qubit must be clean and is returned clean.
    """
    n = len(a)
    if len(b) != n:
        raise ValueError(f"Adder operands differ in width: {n} vs {len(b)}")

    with _maybe_block(cb, annotate, "adder"):
        wires = [carry, *a[:-1]]
        chained = n if carry_out is not None else n - 1
        for i in range(chained):
            _maj(cb, wires[i], b[i], a[i])
        if carry_out is not None:
            cb.cx(a[n - 1], carry_out)
        else:
            if n > 1:
                cb.cx(wires[n - 1], b[n - 1])
            cb.cx(a[n - 1], b[n - 1])
        for i in reversed(range(chained)):
            _uma(cb, wires[i], b[i], a[i])


def emit_sub(cb: CircuitBuilder, a, b, carry: int, borrow: int | None = None, annotate: bool = True):
    """b ← b − a; with borrow the result is len(b)+1 bits wide and borrow is its sign bit."""
    target = [*b, borrow] if borrow is not None else list(b)
    with _maybe_block(cb, annotate, "subtractor"):
        for q in target:
            cb.x(q)
        emit_add(cb, a, b, carry, borrow, annotate=False)
        for q in target:
            cb.x(q)


def emit_ctrl_addsub(cb: CircuitBuilder, ctrl: int, a, b, carry: int, carry_out: int, annotate: bool = True):
    """b ← b + a when ctrl is 0, b ← b − a when ctrl is 1, over len(b)+1 bits."""
    target = [*b, carry_out]
    with _maybe_block(cb, annotate, "ctrl_addsub"):
        for q in target:
            cb.cx(ctrl, q)
        emit_add(cb, a, b, carry, carry_out, annotate=False)
        for q in target:
            cb.cx(ctrl, q)


def emit_const_multiply(cb: CircuitBuilder, operand, out, constant: int, carry: int):
    """out ← operand·constant for a zeroed out register.

    operand must already be sign-extended to at least len(out) qubits. Each set
    bit k of |constant| adds (or subtracts) operand·2^k into out[k:].
    """
    width = len(out)
    if len(operand) < width:
        raise ValueError(f"Operand of {len(operand)} qubits is narrower than the {width}-qubit product")
    magnitude = abs(constant)
    if magnitude.bit_length() > width:
        raise WidthPlanOverflowError(f"Constant {constant} does not fit a {width}-bit product")

    first = True
    for k in range(magnitude.bit_length()):
        if not magnitude >> k & 1:
            continue
        window = out[k:]
        shifted = operand[: len(window)]
        if first and constant > 0:
            for src, dst in zip(shifted, window):
                cb.cx(src, dst)
        elif constant > 0:
            emit_add(cb, shifted, window, carry)
        else:
            emit_sub(cb, shifted, window, carry)
        first = False


def emit_square(cb: CircuitBuilder, s, out, mask, carry: int):
    """out ← s² for two's complement s and a zeroed out of 2·len(s) qubits.

    Term k adds s_k·s·2^k; the sign bit's term is subtracted. The masked copy
    s_k·s is formed in mask and cleared after each term.
    """
    w = len(s)
    if len(out) != 2 * w or len(mask) < 2 * w:
        raise ValueError("Squarer needs an output and a mask of twice the input width")

    for k in range(w):
        span = 2 * w - k
        masking = []
        for i in range(span):
            src = s[min(i, w - 1)]
            masking.append((src, mask[i]))

        def apply_mask():
            for src, dst in masking:
                if src == s[k]:
                    cb.cx(s[k], dst)
                else:
                    cb.ccx(s[k], src, dst)

        apply_mask()
        if k < w - 1:
            emit_add(cb, mask[:span], out[k:], carry)
        else:
            emit_sub(cb, mask[:span], out[k:], carry)
        apply_mask()


def tree_sum_order(count: int) -> list[list[tuple[int, int]]]:
    """Pairings (source, accumulator) per layer of a balanced addition tree."""
    alive = list(range(count))
    layers = []
    while len(alive) > 1:
        pairs = [(alive[i], alive[i + 1]) for i in range(0, len(alive) - 1, 2)]
        layers.append(pairs)
        alive = [acc for _, acc in pairs] + ([alive[-1]] if len(alive) % 2 else [])
    return layers


def tree_sum_result(count: int) -> int:
    """Index of the operand register that ends up holding the sum."""
    alive = list(range(count))
    for pairs in tree_sum_order(count):
        alive = [acc for _, acc in pairs] + ([alive[-1]] if len(alive) % 2 else [])
    return alive[0]


def emit_tree_sum(cb: CircuitBuilder, operands, carries) -> list[int]:
    """Sum equal-width operand registers in ⌈log₂ k⌉ layers of parallel adders."""
    if len(carries) < len(operands) // 2:
        raise ValueError(f"Tree over {len(operands)} operands needs {len(operands) // 2} carry qubits")
    for pairs in tree_sum_order(len(operands)):
        for slot, (src, acc) in enumerate(pairs):
            emit_add(cb, operands[src], operands[acc], carries[slot])
    return operands[tree_sum_result(len(operands))]


def emit_leq_const(cb: CircuitBuilder, v, y: int, tau: int, scratch, const, carry: int):
    """y ^= [v ≤ tau] via the sign of v − (tau+1); scratch and const are returned clean."""
    width = len(v)
    if tau < 0 or tau >= 1 << width:
        raise ValueError(f"Threshold {tau} does not fit an unsigned {width}-bit comparator")
    if len(scratch) != width + 1 or len(const) != width + 1:
        raise ValueError("Comparator scratch and constant registers need width+1 qubits")

    start = len(cb.gates)
    bound = tau + 1
    # one gate per constant bit keeps the cost independent of tau
    for i, q in enumerate(const):
        if bound >> i & 1:
            cb.x(q)
        else:
            cb.cx(scratch[width], q)
    for src, dst in zip(v, scratch):
        cb.cx(src, dst)
    emit_sub(cb, const, scratch, carry)
    stop = len(cb.gates)

    cb.cx(scratch[width], y)
    cb.uncompute(start, stop)


def _maybe_block(cb: CircuitBuilder, annotate: bool, label: str):
    return cb.block(label) if annotate else nullcontext()


# =============================================================================
# Standalone Builders
# =============================================================================


def build_adder(width: int) -> Circuit:
    """|a⟩|b⟩|0⟩ → |a⟩|a+b⟩ with the carry-out in register z."""
    cb = CircuitBuilder()
    a = cb.allocate("a", width, RegisterKind.INPUT)
    b = cb.allocate("b", width, RegisterKind.INPUT)
    z = cb.allocate("z", 1, RegisterKind.OUTPUT)
    carry = cb.allocate("carry", 1)
    emit_add(cb, a, b, carry[0], z[0])
    return cb.build()


def build_subtractor(width: int) -> Circuit:
    """|a⟩|b⟩|0⟩ → |a⟩|b−a⟩ with the sign bit in register sign."""
    cb = CircuitBuilder()
    a = cb.allocate("a", width, RegisterKind.INPUT)
    b = cb.allocate("b", width, RegisterKind.INPUT)
    sign = cb.allocate("sign", 1, RegisterKind.OUTPUT)
    carry = cb.allocate("carry", 1)
    emit_sub(cb, a, b, carry[0], sign[0])
    return cb.build()


def build_ctrl_addsub(width: int) -> Circuit:
    cb = CircuitBuilder()
    ctrl = cb.allocate("ctrl", 1, RegisterKind.INPUT)
    a = cb.allocate("a", width, RegisterKind.INPUT)
    b = cb.allocate("b", width, RegisterKind.INPUT)
    z = cb.allocate("z", 1, RegisterKind.OUTPUT)
    carry = cb.allocate("carry", 1)
    emit_ctrl_addsub(cb, ctrl[0], a, b, carry[0], z[0])
    return cb.build()


def product_width(x_spec: IntRegisterSpec, constant: int) -> int:
    extra = 0 if x_spec.is_signed else 1
    return x_spec.width + abs(constant).bit_length() + extra


def build_const_multiplier(x_spec: IntRegisterSpec, constant: int) -> Circuit:
    """|x⟩|0⟩ → |x⟩|x·constant⟩ with a two's complement product register."""
    cb = CircuitBuilder()
    width = product_width(x_spec, constant)
    x = cb.allocate("x", x_spec.width, RegisterKind.INPUT)
    out = cb.allocate("out", width, RegisterKind.OUTPUT)
    ext = cb.allocate("xext", width)
    carry = cb.allocate("carry", 1)
    if constant == 0:
        return cb.build()

    start = len(cb.gates)
    top = x[-1] if x_spec.is_signed else None
    for i, q in enumerate(ext):
        if i < len(x):
            cb.cx(x[i], q)
        elif top is not None:
            cb.cx(top, q)
    stop = len(cb.gates)

    emit_const_multiply(cb, ext, out, constant, carry[0])
    cb.uncompute(start, stop)
    return cb.build()


def build_squarer(width: int) -> Circuit:
    """|s⟩|0⟩ → |s⟩|s²⟩ for a two's complement s."""
    cb = CircuitBuilder()
    s = cb.allocate("s", width, RegisterKind.INPUT)
    out = cb.allocate("out", 2 * width, RegisterKind.OUTPUT)
    mask = cb.allocate("mask", 2 * width)
    carry = cb.allocate("carry", 1)
    emit_square(cb, s, out, mask, carry[0])
    return cb.build()


def build_tree_sum(operand_widths, count: int) -> Circuit:
    """Registers operand0..operand{k-1}, each widened by ⌈log₂ k⌉ bits; see tree_sum_result."""
    if count < 2:
        raise ValueError("Tree sum needs at least two operands")
    width = max(operand_widths) + clog2(count)
    cb = CircuitBuilder()
    operands = [cb.allocate(f"operand{i}", width, RegisterKind.INPUT) for i in range(count)]
    carries = cb.allocate("carry", count // 2)
    emit_tree_sum(cb, operands, carries)
    return cb.build()


def build_leq_const(width: int, tau: int) -> Circuit:
    cb = CircuitBuilder()
    v = cb.allocate("v", width, RegisterKind.INPUT)
    y = cb.allocate("y", 1, RegisterKind.OUTPUT)
    scratch = cb.allocate("scratch", width + 1)
    const = cb.allocate("const", width + 1)
    carry = cb.allocate("carry", 1)
    emit_leq_const(cb, v, y[0], tau, scratch, const, carry[0])
    return cb.build()
