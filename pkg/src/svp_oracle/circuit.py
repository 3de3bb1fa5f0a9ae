"""
Reversible circuit intermediate representation.

A circuit is an immutable gate list over named qubit registers. Qubits are
global indices and basis states are little-endian: bit q of a basis index is
qubit q. The module also provides the Clifford+T decomposition, inversion,
composition, resource metrics and the plain-text circuit format.
"""

import logging
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum

from svp_oracle.errors import CircuitError

logger = logging.getLogger(__name__)

MCX_SCRATCH = "mcx_scratch"


# =============================================================================
# Data Models
# =============================================================================


class GateKind(str, Enum):
    X = "x"
    CX = "cx"
    CCX = "ccx"
    MCX = "mcx"
    H = "h"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CZ = "cz"


class RegisterKind(str, Enum):
    INPUT = "input"
    ANCILLA = "ancilla"
    OUTPUT = "output"
    CONSTANT_ZERO = "constant-zero"


CLASSICAL_KINDS = frozenset({GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX})
CLIFFORD_T_KINDS = frozenset(
    {GateKind.X, GateKind.CX, GateKind.H, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.CZ}
)
T_KINDS = frozenset({GateKind.T, GateKind.TDG})

_ARITY = {
    GateKind.X: 1,
    GateKind.H: 1,
    GateKind.Z: 1,
    GateKind.S: 1,
    GateKind.SDG: 1,
    GateKind.T: 1,
    GateKind.TDG: 1,
    GateKind.CX: 2,
    GateKind.CZ: 2,
    GateKind.CCX: 3,
}

_INVERSE_KIND = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S, GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}


@dataclass(frozen=True, slots=True)
class Gate:
    """A gate; for controlled kinds the target is the last qubit."""

    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        expected = _ARITY.get(self.kind)
        if expected is None:
            if len(self.qubits) < 4:
                raise CircuitError(f"mcx needs at least 3 controls, got {len(self.qubits) - 1}")
        elif len(self.qubits) != expected:
            raise CircuitError(f"{self.kind.value} takes {expected} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind.value} on repeated qubits {self.qubits}")
        if min(self.qubits) < 0:
            raise CircuitError(f"Negative qubit index in {self.qubits}")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]

    @property
    def target(self) -> int:
        return self.qubits[-1]


def mcx(controls, target) -> Gate:
    """Multi-controlled X, normalized to X/CX/CCX for fewer than 3 controls."""
    qubits = (*controls, target)
    kind = {1: GateKind.X, 2: GateKind.CX, 3: GateKind.CCX}.get(len(qubits), GateKind.MCX)
    return Gate(kind, qubits)


@dataclass(frozen=True)
class QubitRegister:
    name: str
    offset: int
    width: int
    kind: RegisterKind

    def __post_init__(self):
        if self.width < 1:
            raise CircuitError(f"Register {self.name} must have width >= 1")

    @property
    def indices(self) -> list[int]:
        return list(range(self.offset, self.offset + self.width))


@dataclass(frozen=True)
class CostedBlock:
    """Gate range [start, stop) scheduled as one arithmetic block."""

    label: str
    start: int
    stop: int

    def shifted(self, offset: int) -> "CostedBlock":
        return CostedBlock(self.label, self.start + offset, self.stop + offset)


@dataclass(frozen=True)
class ResourceMetrics:
    width: int
    depth: int
    quantum_cost: int
    t_count: int
    t_depth: int

    def then(self, other: "ResourceMetrics") -> "ResourceMetrics":
        """Metrics of running self and then other on the same qubits."""
        return ResourceMetrics(
            width=max(self.width, other.width),
            depth=self.depth + other.depth,
            quantum_cost=self.quantum_cost + other.quantum_cost,
            t_count=self.t_count + other.t_count,
            t_depth=self.t_depth + other.t_depth,
        )

    def repeated(self, times: int) -> "ResourceMetrics":
        return ResourceMetrics(
            width=self.width,
            depth=self.depth * times,
            quantum_cost=self.quantum_cost * times,
            t_count=self.t_count * times,
            t_depth=self.t_depth * times,
        )


@dataclass(frozen=True)
class Circuit:
    width: int
    registers: tuple[QubitRegister, ...] = ()
    gates: tuple[Gate, ...] = ()
    blocks: tuple[CostedBlock, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        _check_registers(self.registers, self.width)
        for gate in self.gates:
            if max(gate.qubits) >= self.width:
                raise CircuitError(f"Gate {gate.kind.value} {gate.qubits} exceeds circuit width {self.width}")

    @property
    def is_classical(self) -> bool:
        return all(gate.kind in CLASSICAL_KINDS for gate in self.gates)

    def register(self, name: str) -> QubitRegister:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(name)

    def qubits_of(self, kind: RegisterKind) -> list[int]:
        return [q for reg in self.registers if reg.kind == kind for q in reg.indices]

    def without_gate(self, index: int) -> "Circuit":
        """Copy with one gate removed (mutation testing); block annotations dropped."""
        gates = self.gates[:index] + self.gates[index + 1 :]
        return Circuit(self.width, self.registers, gates)


def _check_registers(registers, width: int):
    taken: dict[int, str] = {}
    names = set()
    for reg in registers:
        if reg.name in names:
            raise CircuitError(f"Duplicate register name {reg.name}")
        names.add(reg.name)
        if reg.offset < 0 or reg.offset + reg.width > width:
            raise CircuitError(f"Register {reg.name} outside circuit width {width}")
        for q in reg.indices:
            if q in taken:
                raise CircuitError(f"Registers {taken[q]} and {reg.name} overlap at qubit {q}")
            taken[q] = reg.name


# =============================================================================
# Builder
# =============================================================================


class CircuitBuilder:
    """Mutable helper that allocates registers and appends gates."""

    def __init__(self):
        self.width = 0
        self.registers: list[QubitRegister] = []
        self.gates: list[Gate] = []
        self.blocks: list[CostedBlock] = []

    @classmethod
    def extending(cls, c: Circuit, gates: bool = True) -> "CircuitBuilder":
        """Builder over an existing circuit's registers, optionally keeping its gates."""
        cb = cls()
        cb.width = c.width
        cb.registers = list(c.registers)
        if gates:
            cb.gates = list(c.gates)
            cb.blocks = list(c.blocks)
        return cb

    def allocate(self, name: str, width: int, kind: RegisterKind = RegisterKind.ANCILLA) -> list[int]:
        reg = QubitRegister(name, self.width, width, kind)
        self.registers.append(reg)
        self.width += width
        return reg.indices

    def add(self, kind: GateKind, *qubits: int):
        self.gates.append(Gate(kind, tuple(qubits)))

    def x(self, q: int):
        self.gates.append(Gate(GateKind.X, (q,)))

    def cx(self, control: int, target: int):
        self.gates.append(Gate(GateKind.CX, (control, target)))

    def ccx(self, a: int, b: int, target: int):
        self.gates.append(Gate(GateKind.CCX, (a, b, target)))

    def mcx(self, controls, target: int):
        self.gates.append(mcx(controls, target))

    def extend(self, gates):
        self.gates.extend(gates)

    @contextmanager
    def block(self, label: str):
        """Annotate the gates appended inside the context as one block."""
        start = len(self.gates)
        yield
        self.blocks.append(CostedBlock(label, start, len(self.gates)))

    def uncompute(self, start: int, stop: int):
        """Append the inverse of gates [start, stop), mirroring their block annotations."""
        base = len(self.gates)
        self.gates.extend(invert_gate(g) for g in reversed(self.gates[start:stop]))
        mirrored = [b for b in self.blocks if start <= b.start and b.stop <= stop]
        for b in reversed(mirrored):
            self.blocks.append(CostedBlock(b.label, base + stop - b.stop, base + stop - b.start))

    def build(self) -> Circuit:
        return Circuit(self.width, tuple(self.registers), tuple(self.gates), tuple(self.blocks))


# =============================================================================
# Composition and Inversion
# =============================================================================


def compose(c1: Circuit, c2: Circuit) -> Circuit:
    """c1 followed by c2; registers with the same name must coincide."""
    merged = {reg.name: reg for reg in c1.registers}
    for reg in c2.registers:
        existing = merged.get(reg.name)
        if existing is not None and existing != reg:
            raise CircuitError(f"Register collision on {reg.name}: {existing} vs {reg}")
        merged[reg.name] = reg

    offset = len(c1.gates)
    shifted = tuple(b.shifted(offset) for b in c2.blocks)
    return Circuit(
        width=max(c1.width, c2.width),
        registers=tuple(merged.values()),
        gates=c1.gates + c2.gates,
        blocks=c1.blocks + shifted,
    )


def invert_gate(gate: Gate) -> Gate:
    kind = _INVERSE_KIND.get(gate.kind)
    return gate if kind is None else Gate(kind, gate.qubits)


def inverse(c: Circuit) -> Circuit:
    """Reverse gate order, swapping S↔S† and T↔T†."""
    total = len(c.gates)
    gates = tuple(invert_gate(g) for g in reversed(c.gates))
    blocks = tuple(CostedBlock(b.label, total - b.stop, total - b.start) for b in reversed(c.blocks))
    return Circuit(c.width, c.registers, gates, blocks)


# =============================================================================
# Decomposition
# =============================================================================


def _scratch_qubits(c: Circuit) -> list[int]:
    try:
        return c.register(MCX_SCRATCH).indices
    except KeyError:
        return []


def mcx_to_ccx(controls, target: int, scratch) -> list[tuple[int, int, int]]:
    """Toffoli ladder for k ≥ 3 controls using k−2 clean scratch qubits: 2(k−2)+1 CCX."""
    k = len(controls)
    if len(scratch) < k - 2:
        raise CircuitError(f"mcx with {k} controls needs {k - 2} scratch qubits, {len(scratch)} available")

    ladder = [(controls[0], controls[1], scratch[0])]
    for i in range(2, k - 1):
        ladder.append((controls[i], scratch[i - 2], scratch[i - 1]))
    return ladder + [(controls[k - 1], scratch[k - 3], target)] + ladder[::-1]


def _toffolis(gate: Gate, scratch):
    if gate.kind == GateKind.CCX:
        return [gate.qubits]
    return mcx_to_ccx(gate.controls, gate.target, scratch)


def ccx_clifford_t(a: int, b: int, c: int) -> list[Gate]:
    """Toffoli as 7 T/T†, 7 CX and 2 H in three T stages."""
    H, T, TDG, CX = GateKind.H, GateKind.T, GateKind.TDG, GateKind.CX
    return [
        Gate(H, (c,)),
        Gate(T, (a,)),
        Gate(T, (b,)),
        Gate(T, (c,)),
        Gate(CX, (b, a)),
        Gate(CX, (c, b)),
        Gate(CX, (a, c)),
        Gate(TDG, (b,)),
        Gate(CX, (a, b)),
        Gate(TDG, (a,)),
        Gate(TDG, (b,)),
        Gate(T, (c,)),
        Gate(CX, (c, b)),
        Gate(CX, (a, c)),
        Gate(CX, (b, a)),
        Gate(H, (c,)),
    ]


def _clifford_t_stream(c: Circuit):
    scratch = _scratch_qubits(c)
    for gate in c.gates:
        if gate.kind in (GateKind.CCX, GateKind.MCX):
            for a, b, t in _toffolis(gate, scratch):
                yield from ccx_clifford_t(a, b, t)
        else:
            yield gate


def decompose_clifford_t(c: Circuit) -> Circuit:
    """Expand CCX and MCX into the Clifford+T gate set."""
    return Circuit(c.width, c.registers, tuple(_clifford_t_stream(c)))


def _two_qubit_stream(gate: Gate, scratch):
    """(support, holds_t) of the ≤2-qubit gates realizing one gate; CCX costs 5.

    A Toffoli runs V(b,t), CX(a,b), V†(b,t), CX(a,b), V(a,t); its T gates sit
    in the three controlled-V steps.
    """
    if gate.kind in (GateKind.CCX, GateKind.MCX):
        for a, b, t in _toffolis(gate, scratch):
            yield (b, t), True
            yield (a, b), False
            yield (b, t), True
            yield (a, b), False
            yield (a, t), True
    else:
        yield gate.qubits, gate.kind in T_KINDS


# =============================================================================
# Metrics
# =============================================================================


def _place(gate: Gate, scratch, ready, t_layers: set[int] | None = None) -> int:
    """Schedule one gate ASAP on ready (qubit -> last busy layer); returns its cost."""
    cost = 0
    for support, holds_t in _two_qubit_stream(gate, scratch):
        layer = max(ready[q] for q in support) + 1
        for q in support:
            ready[q] = layer
        if holds_t and t_layers is not None:
            t_layers.add(layer)
        cost += 1
    return cost


def _block_depth(c: Circuit, scratch) -> int:
    """Depth with every annotated block scheduled as one operation over its qubits."""
    ready = [0] * c.width
    block_at = {b.start: b for b in c.blocks if b.stop > b.start}

    index = 0
    while index < len(c.gates):
        block = block_at.get(index)
        if block is None:
            _place(c.gates[index], scratch, ready)
            index += 1
            continue

        local = defaultdict(int)
        for gate in c.gates[block.start : block.stop]:
            _place(gate, scratch, local)
        finish = max(ready[q] for q in local) + max(local.values())
        for q in local:
            ready[q] = finish
        index = block.stop

    return max(ready, default=0)


def metrics(c: Circuit, costing: str = "gates") -> ResourceMetrics:
    """Width, ASAP depth, quantum cost, T-count and T-depth.

    T-depth is the number of layers of the ASAP schedule holding at least one
    T or T† gate. With costing="blocks", each annotated block is scheduled as
    one operation over the union of its qubits lasting the depth of its own
    gates; quantum cost is the same sum of gate costs under both conventions.
    """
    if costing not in ("gates", "blocks"):
        raise ValueError(f"Unknown costing convention {costing!r}")

    scratch = _scratch_qubits(c)
    ready = [0] * c.width
    t_layers: set[int] = set()
    quantum_cost = sum(_place(gate, scratch, ready, t_layers) for gate in c.gates)
    depth = max(ready, default=0) if costing == "gates" else _block_depth(c, scratch)

    return ResourceMetrics(
        width=c.width,
        depth=depth,
        quantum_cost=quantum_cost,
        t_count=sum(gate.kind in T_KINDS for gate in _clifford_t_stream(c)),
        t_depth=len(t_layers),
    )


# =============================================================================
# Text Format
# =============================================================================


def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.width}"]
    lines.extend(f"reg {r.name} {r.offset} {r.width} {r.kind.value}" for r in c.registers)
    lines.extend(f"block {b.label} {b.start} {b.stop}" for b in c.blocks)
    lines.extend(f"{g.kind.value} {' '.join(str(q) for q in g.qubits)}" for g in c.gates)
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    width = None
    registers, gates, blocks = [], [], []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, *rest = line.split()
        try:
            if head == "qubits":
                width = int(rest[0])
            elif head == "reg":
                name, offset, reg_width, kind = rest
                registers.append(QubitRegister(name, int(offset), int(reg_width), RegisterKind(kind)))
            elif head == "block":
                label, start, stop = rest
                blocks.append(CostedBlock(label, int(start), int(stop)))
            else:
                gates.append(Gate(GateKind(head), tuple(int(q) for q in rest)))
        except (ValueError, TypeError, IndexError) as e:
            raise CircuitError(f"Line {lineno}: cannot parse {line!r}: {e}") from e

    if width is None:
        raise CircuitError("Circuit text is missing the 'qubits' header")
    return Circuit(width, tuple(registers), tuple(gates), tuple(blocks))
