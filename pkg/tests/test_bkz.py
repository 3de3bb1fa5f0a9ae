"""
Tests for LLL, block enumeration, BKZ and the blocksize analysis.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from svp_oracle.bkz import (
    DEFAULT_ENUMERATION_CONSTANT,
    HERMITE_POWERS,
    Backend,
    BkzConfig,
    TerminationPolicy,
    _insert,
    bkz_reduce,
    bkz_report,
    classical_log2_cost,
    crossover_analysis,
    equivalent_quantum_beta,
    hermite_constant,
    is_size_reduced,
    lll,
    quality_bound,
    quantum_log2_cost,
    svp_in_block,
)
from svp_oracle.errors import InvalidBasisError
from svp_oracle.lattice import LatticeBasis, gram_schmidt, vector_length_sq
from svp_oracle.oracle import BoundMethod, derive_bounds
from svp_oracle.sim import brute_force_svp

# Rows of U·diag(3, 5, 7, 11) for a unimodular U; λ₁² = 9
HIDDEN_SHORT_ROWS = [[3, 10, 21, 11], [0, 5, -7, 22], [0, 0, 7, 33], [0, 0, 0, 11]]


@pytest.fixture
def hidden_basis():
    """Provide a 4-dimensional basis whose shortest vector has length 3."""
    return LatticeBasis.from_rows(HIDDEN_SHORT_ROWS)


class TestLll:
    """Test exact LLL reduction."""

    def test_worked_example(self, worked_basis):
        """Test size reduction of the worked example."""
        reduced = lll(worked_basis)
        assert reduced.rows == ((2, 1), (-1, 2))
        assert is_size_reduced(reduced)

    def test_lovasz_condition(self):
        """Test the reduced basis satisfies the Lovász condition."""
        basis = LatticeBasis.from_rows([[1, 1, 1], [-1, 0, 2], [3, 5, 6]])
        reduced = lll(basis)
        gs = gram_schmidt(reduced)
        delta = Fraction("0.99")
        for k in range(1, reduced.n):
            assert gs.bstar_norms_sq[k] >= (delta - gs.mu[k][k - 1] ** 2) * gs.bstar_norms_sq[k - 1]
        assert is_size_reduced(reduced)
        assert reduced.volume_sq == basis.volume_sq

    def test_single_row(self, rank_one_basis):
        """Test a single row is returned unchanged."""
        assert lll(rank_one_basis) == rank_one_basis


class TestSvpInBlock:
    """Test exact enumeration in projected windows."""

    def test_already_shortest(self, worked_basis):
        """Test no improvement when the first vector is shortest."""
        solution = svp_in_block(worked_basis, 0, 2)
        assert solution.length_sq == 5
        assert not solution.improved

    def test_improvement(self):
        """Test a shorter vector than the first row is found."""
        basis = LatticeBasis.from_rows([[1, 3], [2, 1]])
        solution = svp_in_block(basis, 0, 2)
        assert solution.improved
        assert solution.length_sq == 5
        assert vector_length_sq(basis, solution.coefficients) == 5

    def test_full_window_finds_lambda_one(self, hidden_basis):
        """Test the full window finds the hidden short vector."""
        solution = svp_in_block(hidden_basis, 0, 4)
        assert solution.length_sq == 9
        assert vector_length_sq(hidden_basis, solution.coefficients) == 9

    def test_window_of_one(self, worked_basis):
        """Test a one-row window returns that row."""
        solution = svp_in_block(worked_basis, 1, 2)
        assert solution.coefficients == (1,)
        assert not solution.improved

    def test_invalid_window(self, worked_basis):
        """Test an empty window raises."""
        with pytest.raises(ValueError):
            svp_in_block(worked_basis, 1, 1)


class TestInsert:
    """Test insertion of a found vector."""

    def test_insert_difference(self):
        """Test b₀ − b₁ becomes the first row of an equivalent basis."""
        rows = [[1, 3], [2, 1]]
        _insert(rows, 0, (1, -1))
        assert rows[0] == [-1, 2]
        assert LatticeBasis.from_rows(rows).volume_sq == 25

    def test_not_primitive(self):
        """Test a non-primitive coefficient vector raises."""
        with pytest.raises(ArithmeticError):
            _insert([[1, 0], [0, 1]], 0, (2, 0))


class TestBkz:
    """Test BKZ tours."""

    def test_config_validation(self):
        """Test invalid configurations raise."""
        with pytest.raises(ValueError):
            BkzConfig(beta=1)
        with pytest.raises(ValueError):
            BkzConfig(beta=2, max_tours=0)
        with pytest.raises(ValueError):
            BkzConfig(beta=2, delta=1.0)

    def test_blocksize_above_dimension(self, worked_basis):
        """Test beta > n raises."""
        with pytest.raises(ValueError):
            bkz_reduce(worked_basis, BkzConfig(beta=3))

    def test_full_blocksize_is_shortest(self, hidden_basis):
        """Test BKZ-n puts a shortest vector first."""
        result = bkz_reduce(hidden_basis, BkzConfig(beta=4))
        assert result.first_vector_norm_sq == 9
        assert result.basis.volume_sq == hidden_basis.volume_sq

    def test_ledger(self, hidden_basis):
        """Test each tour makes n−1 SVP calls."""
        result = bkz_reduce(hidden_basis, BkzConfig(beta=2))
        assert result.ledger.calls_in_tour(1) == 3
        assert result.ledger.svp_calls == 3 * result.tours_executed
        assert result.ledger.total_nodes > 0
        assert result.ledger.quantum_totals is None

    def test_fixed_tour_count(self, hidden_basis):
        """Test the none policy runs exactly max_tours."""
        cfg = BkzConfig(beta=3, max_tours=2, early_termination=TerminationPolicy.NONE)
        assert bkz_reduce(hidden_basis, cfg).tours_executed == 2

    def test_no_change_policy(self, hidden_basis):
        """Test the no-change policy stops after a quiet tour."""
        cfg = BkzConfig(beta=3, early_termination=TerminationPolicy.NO_CHANGE)
        result = bkz_reduce(hidden_basis, cfg)
        last = result.tours_executed
        assert not any(c.improved for c in result.ledger.calls if c.tour == last)

    def test_grover_cost_backend(self, hidden_basis):
        """Test the quantum backend finds the same basis and charges every call."""
        classical = bkz_reduce(hidden_basis, BkzConfig(beta=2))
        quantum = bkz_reduce(hidden_basis, BkzConfig(beta=2), Backend.GROVER_COST)
        assert quantum.basis == classical.basis
        assert all(c.iterations == 1 for c in quantum.ledger.calls)
        assert quantum.ledger.quantum_totals is not None

    def test_report(self, hidden_basis):
        """Test the report records the quality bound."""
        cfg = BkzConfig(beta=2)
        result = bkz_reduce(hidden_basis, cfg)
        report = bkz_report(hidden_basis, result, cfg, Backend.CLASSICAL)
        assert report["bound_satisfied"] is True
        assert report["quality_bound"] == pytest.approx((4 / 3) ** 0.75 * 1155**0.25, rel=1e-6)
        assert report["ledger"]["svp_calls"] == result.ledger.svp_calls
        assert report["output_basis"][0] == list(result.basis.rows[0])


class TestQualityBound:
    """Test Hermite constants and the BKZ quality bound."""

    def test_hermite_constants(self):
        """Test tabulated γ_β."""
        assert hermite_constant(2) == pytest.approx(math.sqrt(4 / 3))
        assert hermite_constant(8) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            hermite_constant(9)

    def test_growth_rate_nonincreasing(self):
        """Test ln γ_β/(β−1) never increases with β."""
        rates = [math.log(hermite_constant(b)) / (b - 1) for b in range(2, max(HERMITE_POWERS) + 1)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(rates, rates[1:]))

    def test_two_dimensional(self):
        """Test the bound for n = β = 2 and unit volume."""
        assert quality_bound(2, 2, 1.0) == pytest.approx((4 / 3) ** 0.25)

    def test_invalid_blocksize(self):
        """Test β outside [2, n] raises."""
        with pytest.raises(ValueError):
            quality_bound(3, 4, 1.0)


class TestCrossover:
    """Test the classical versus quantum blocksize analysis."""

    def test_quantum_halves_exponent(self):
        """Test the quantum exponent is half the classical one."""
        assert quantum_log2_cost(50) == pytest.approx(classical_log2_cost(50) / 2)

    def test_equivalent_beta(self):
        """Test classical β=40 matches quantum β≈69.6."""
        assert equivalent_quantum_beta(40) == pytest.approx(69.6, abs=0.1)

    def test_extra_cost_lowers_equivalent_beta(self):
        """Test a per-iteration circuit cost reduces the equivalent blocksize."""
        plain = equivalent_quantum_beta(40)
        costed = equivalent_quantum_beta(40, extra_log2=lambda b: 3 * math.log2(b))
        assert costed < plain

    def test_analysis_rows(self):
        """Test the analysis table."""
        result = crossover_analysis()
        assert result["c"] == DEFAULT_ENUMERATION_CONSTANT
        assert [r["beta"] for r in result["rows"]] == list(range(10, 101, 10))
        assert not result["measured_cost_included"]

    def test_nonpositive_constant(self):
        """Test c ≤ 0 raises."""
        with pytest.raises(ValueError):
            crossover_analysis(c=0)


def _random_basis(rng, n: int, bound: int) -> LatticeBasis:
    while True:
        rows = rng.integers(-bound, bound, size=(n, n), endpoint=True).tolist()
        try:
            return LatticeBasis.from_rows(rows)
        except InvalidBasisError:
            continue


class TestRandomReductions:
    """Test BKZ on seeded random bases."""

    @pytest.mark.parametrize("seed", range(20))
    def test_full_blocksize_matches_brute_force(self, seed):
        """Test BKZ-n returns λ₁ first, a size-reduced basis and the same volume."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5, endpoint=True))
        basis = _random_basis(rng, n, 4)
        result = bkz_reduce(basis, BkzConfig(beta=n))

        reference = lll(basis)
        radius = math.sqrt(result.first_vector_norm_sq) + 1e-9
        encoding = derive_bounds(reference, BoundMethod.DUAL_BASIS, radius)
        shortest = brute_force_svp(reference, encoding)
        assert result.first_vector_norm_sq == shortest.length_sq
        assert is_size_reduced(result.basis)
        assert result.basis.volume_sq == basis.volume_sq

    @pytest.mark.slow
    def test_quality_bound_rate(self):
        """Test the first vector meets the BKZ-β bound on at least 95% of runs."""
        rng = np.random.default_rng(5)
        outcomes = []
        for run in range(42):
            beta = 2 + run % 7
            n = int(rng.integers(max(beta, 3), 20, endpoint=True))
            basis = _random_basis(rng, n, 10)
            cfg = BkzConfig(beta=beta)
            report = bkz_report(basis, bkz_reduce(basis, cfg), cfg, Backend.CLASSICAL)
            outcomes.append(report["bound_satisfied"])
        assert all(outcome is not None for outcome in outcomes)
        assert sum(outcomes) >= 0.95 * len(outcomes)
