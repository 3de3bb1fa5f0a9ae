"""
Tests for the simulators and classical references.
"""

import numpy as np
import pytest

from svp_oracle.circuit import Circuit, CircuitBuilder, Gate, GateKind, RegisterKind
from svp_oracle.errors import ResourceCapError, SimulationError
from svp_oracle.oracle import BoundMethod, derive_bounds
from svp_oracle.sim import (
    BasisState,
    brute_force_svp,
    encode_registers,
    oracle_truth_table,
    pattern_planes,
    probabilities,
    read_register,
    run_bitwise,
    run_bitwise_batch,
    run_statevector,
    verify_oracle,
)


class TestBasisState:
    """Test basis state helpers."""

    def test_bits(self):
        """Test little-endian bit access."""
        state = BasisState.from_bits([1, 0, 1])
        assert state.value == 5
        assert state.bits == [1, 0, 1]
        assert state.bit(2) == 1

    def test_value_too_wide(self):
        """Test a value wider than the state raises."""
        with pytest.raises(ValueError):
            BasisState(2, 4)

    def test_registers(self):
        """Test writing and reading named registers."""
        cb = CircuitBuilder()
        cb.allocate("a", 3)
        cb.allocate("b", 2)
        c = cb.build()
        state = encode_registers(c, {"a": -1, "b": 2})
        assert read_register(c, state, "a") == 7
        assert read_register(c, state, "a", signed=True) == -1
        assert read_register(c, state, "b") == 2


class TestBitwise:
    """Test the permutation simulator."""

    def test_toffoli_truth_table(self):
        """Test CCX flips the target only when both controls are set."""
        c = Circuit(3, (), (Gate(GateKind.CCX, (0, 1, 2)),))
        for value in range(8):
            expected = value ^ 4 if value & 3 == 3 else value
            assert run_bitwise(c, BasisState(3, value)).value == expected

    def test_mcx(self):
        """Test an MCX acts without scratch in the bitwise simulator."""
        c = Circuit(4, (), (Gate(GateKind.MCX, (0, 1, 2, 3)),))
        assert run_bitwise(c, BasisState(4, 0b0111)).value == 0b1111
        assert run_bitwise(c, BasisState(4, 0b0101)).value == 0b0101

    def test_rejects_hadamard(self):
        """Test non-classical gates raise."""
        c = Circuit(1, (), (Gate(GateKind.H, (0,)),))
        with pytest.raises(SimulationError):
            run_bitwise(c, BasisState(1, 0))

    def test_width_mismatch(self):
        """Test a state of the wrong width raises."""
        c = Circuit(2, (), (Gate(GateKind.CX, (0, 1)),))
        with pytest.raises(ValueError):
            run_bitwise(c, BasisState(3, 0))

    def test_batch_matches_single(self):
        """Test the batched simulator agrees with the single-state one."""
        c = Circuit(
            4,
            (),
            (
                Gate(GateKind.X, (0,)),
                Gate(GateKind.CX, (0, 1)),
                Gate(GateKind.CCX, (1, 2, 3)),
                Gate(GateKind.MCX, (0, 1, 2, 3)),
            ),
        )
        patterns = np.arange(16)
        planes = run_bitwise_batch(c, pattern_planes(4, range(4), patterns))
        for k in range(16):
            expected = run_bitwise(c, BasisState(4, k)).value
            got = sum(int(planes[q, k]) << q for q in range(4))
            assert got == expected


class TestStatevector:
    """Test the dense statevector simulator."""

    def test_hadamard_uniform(self):
        """Test H on every qubit gives the uniform superposition."""
        c = Circuit(3, (), tuple(Gate(GateKind.H, (q,)) for q in range(3)))
        probs = probabilities(run_statevector(c))
        np.testing.assert_allclose(probs, np.full(8, 1 / 8))

    def test_index_is_basis_value(self):
        """Test flat indices follow the little-endian basis convention."""
        c = Circuit(3, (), (Gate(GateKind.X, (0,)), Gate(GateKind.X, (2,))))
        psi = run_statevector(c)
        assert abs(psi[0b101]) == pytest.approx(1.0)

    def test_phase_gates(self):
        """Test T·T = S and S·S = Z on |1⟩."""
        c = Circuit(1, (), (Gate(GateKind.X, (0,)), Gate(GateKind.T, (0,)), Gate(GateKind.T, (0,))))
        assert run_statevector(c)[1] == pytest.approx(1j)
        c = Circuit(1, (), (Gate(GateKind.X, (0,)), Gate(GateKind.S, (0,)), Gate(GateKind.S, (0,))))
        assert run_statevector(c)[1] == pytest.approx(-1)

    def test_cz(self):
        """Test CZ negates |11⟩ only."""
        c = Circuit(2, (), (Gate(GateKind.CZ, (0, 1)),))
        psi = run_statevector(c, np.full(4, 0.5))
        np.testing.assert_allclose(psi, [0.5, 0.5, 0.5, -0.5])

    def test_initial_amplitudes_length(self):
        """Test initial amplitudes of the wrong length raise."""
        with pytest.raises(ValueError):
            run_statevector(Circuit(2), np.ones(3))

    def test_cap(self):
        """Test circuits above the qubit cap are refused."""
        with pytest.raises(ResourceCapError):
            run_statevector(Circuit(5), max_qubits=4)

    def test_agrees_with_bitwise(self):
        """Test classical circuits give the same basis state in both simulators."""
        cb = CircuitBuilder()
        cb.allocate("q", 4, RegisterKind.INPUT)
        cb.cx(0, 1)
        cb.ccx(0, 1, 2)
        cb.x(3)
        c = cb.build()
        for value in range(16):
            out = run_bitwise(c, BasisState(4, value)).value
            assert abs(run_statevector(c, BasisState(4, value))[out]) == pytest.approx(1.0)


class TestBruteForce:
    """Test the classical brute-force reference."""

    def test_worked_example(self, worked_basis):
        """Test shortest length² 5 and five solutions at tau=5."""
        encoding = derive_bounds(worked_basis, BoundMethod.UNIFORM, 2)
        result = brute_force_svp(worked_basis, encoding, tau=5, collect=True)
        assert result.length_sq == 5
        assert result.patterns == 64
        assert result.solution_count_leq_tau == 5
        assert sorted(result.all_solutions) == [(-1, 0), (-1, 1), (0, 0), (1, -1), (1, 0)]

    def test_tau_zero(self, worked_basis):
        """Test tau=0 leaves only the zero vector."""
        encoding = derive_bounds(worked_basis, BoundMethod.UNIFORM, 2)
        assert brute_force_svp(worked_basis, encoding, tau=0).solution_count_leq_tau == 1

    def test_shortest_satisfies_predicate(self, worked_basis):
        """Test the reported shortest vector has the reported length."""
        from svp_oracle.lattice import vector_length_sq

        encoding = derive_bounds(worked_basis, BoundMethod.UNIFORM, 3)
        result = brute_force_svp(worked_basis, encoding)
        assert vector_length_sq(worked_basis, result.shortest_x) == result.length_sq
        assert result.solution_count_leq_tau is None

    def test_cap(self, worked_basis):
        """Test the pattern cap."""
        encoding = derive_bounds(worked_basis, BoundMethod.UNIFORM, 2)
        with pytest.raises(ResourceCapError):
            brute_force_svp(worked_basis, encoding, cap=32)


class TestVerification:
    """Test oracle verification helpers."""

    def test_bit_cap(self, worked_oracle):
        """Test verification above the bit cap is refused."""
        with pytest.raises(ResourceCapError):
            verify_oracle(worked_oracle, cap_bits=5)
        with pytest.raises(ResourceCapError):
            oracle_truth_table(worked_oracle, cap_bits=5)

    def test_truth_table_matches_brute_force(self, worked_oracle, worked_basis):
        """Test the truth table marks exactly the brute-force solutions."""
        table = oracle_truth_table(worked_oracle)
        marked = sorted(worked_oracle.encoding.decode_pattern(int(p)) for p in np.flatnonzero(table))
        result = brute_force_svp(worked_basis, worked_oracle.encoding, tau=5, collect=True)
        assert marked == sorted(result.all_solutions)
