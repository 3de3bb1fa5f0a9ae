"""
BKZ lattice reduction with pluggable SVP backends.

- lll: exact rational LLL with incremental Gram-Schmidt updates
- svp_in_block: exact Schnorr-Euchner enumeration on a projected window
- bkz_reduce: sliding-window tours with insertion and prefix re-reduction
- quality_bound / crossover_analysis: blocksize analysis

The grover-cost backend finds exactly the same vectors as the classical one
and additionally charges each call with the resources of a Grover search of
that block dimension.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from svp_oracle import config
from svp_oracle.circuit import ResourceMetrics
from svp_oracle.estimate import sweep_point
from svp_oracle.lattice import (
    LatticeBasis,
    dot,
    gaussian_heuristic_of,
    gram_schmidt,
    orthogonalize,
    project,
    volume_root,
)
from svp_oracle.oracle import coeff_bits_for, dual_norm_bounds
from svp_oracle.reports import metrics_to_dict

logger = logging.getLogger(__name__)

# γ_β^β for β ≤ 8
HERMITE_POWERS = {
    1: Fraction(1),
    2: Fraction(4, 3),
    3: Fraction(2),
    4: Fraction(4),
    5: Fraction(8),
    6: Fraction(64, 3),
    7: Fraction(64),
    8: Fraction(256),
}

# Enumeration constant c in 2^{c·β·log β}
DEFAULT_ENUMERATION_CONSTANT = 1 / (2 * math.e)


# =============================================================================
# Data Models
# =============================================================================


class TerminationPolicy(str, Enum):
    NONE = "none"
    NO_CHANGE = "no-change"
    TOUR_BUDGET = "tour-budget"


class Backend(str, Enum):
    CLASSICAL = "classical"
    GROVER_COST = "grover-cost"


@dataclass(frozen=True)
class BkzConfig:
    beta: int
    max_tours: int = 8
    early_termination: TerminationPolicy = TerminationPolicy.TOUR_BUDGET
    delta: float = config.DEFAULT_LLL_DELTA
    seed: int = config.DEFAULT_SEED  # basis seed for Grover-costed block plans

    def __post_init__(self):
        if self.beta < 2:
            raise ValueError(f"Blocksize must be at least 2, got {self.beta}")
        if self.max_tours < 1:
            raise ValueError("max_tours must be positive")
        if not 0.25 < self.delta < 1:
            raise ValueError(f"LLL delta must lie in (0.25, 1), got {self.delta}")
        object.__setattr__(self, "early_termination", TerminationPolicy(self.early_termination))


@dataclass
class SvpCall:
    tour: int
    start: int
    stop: int
    nodes: int
    improved: bool
    search_bits: int
    iterations: int | None = None
    quantum: ResourceMetrics | None = None

    @property
    def dimension(self) -> int:
        return self.stop - self.start


@dataclass
class CostLedger:
    calls: list[SvpCall] = field(default_factory=list)

    @property
    def svp_calls(self) -> int:
        return len(self.calls)

    @property
    def total_nodes(self) -> int:
        return sum(c.nodes for c in self.calls)

    def calls_in_tour(self, tour: int) -> int:
        return sum(1 for c in self.calls if c.tour == tour)

    @property
    def quantum_totals(self) -> ResourceMetrics | None:
        charged = [c.quantum for c in self.calls if c.quantum is not None]
        if not charged:
            return None
        total = charged[0]
        for m in charged[1:]:
            total = total.then(m)
        return total


@dataclass
class ReducedBasis:
    basis: LatticeBasis
    tours_executed: int
    ledger: CostLedger

    @property
    def first_vector_norm_sq(self) -> int:
        b = self.basis.rows[0]
        return dot(b, b)


# =============================================================================
# LLL
# =============================================================================


def _size_reduce(b, mu, k: int, l: int):
    if abs(mu[k][l]) <= Fraction(1, 2):
        return
    r = round(mu[k][l])
    b[k] = [x - r * y for x, y in zip(b[k], b[l])]
    mu[k][l] -= r
    for j in range(l):
        mu[k][j] -= r * mu[l][j]


def _lll_rows(rows, delta: Fraction) -> list[list[int]]:
    b = [list(r) for r in rows]
    n = len(b)
    if n < 2:
        return b
    gs = orthogonalize(b)
    mu = [list(r) for r in gs.mu]
    B = list(gs.bstar_norms_sq)

    k = 1
    while k < n:
        _size_reduce(b, mu, k, k - 1)
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            q = mu[k][k - 1]
            merged = B[k] + q * q * B[k - 1]
            mu[k][k - 1] = q * B[k - 1] / merged
            B[k] = B[k - 1] * B[k] / merged
            B[k - 1] = merged
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - q * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                _size_reduce(b, mu, k, l)
            k += 1
    return b


def lll(basis: LatticeBasis, delta: float = config.DEFAULT_LLL_DELTA) -> LatticeBasis:
    """δ-LLL reduced basis of the same lattice, computed over exact rationals."""
    return LatticeBasis.from_rows(_lll_rows(basis.rows, Fraction(str(delta))))


def is_size_reduced(basis: LatticeBasis) -> bool:
    mu = basis._gs.mu
    return all(abs(mu[i][j]) <= Fraction(1, 2) for i in range(basis.n) for j in range(i))


# =============================================================================
# Enumeration
# =============================================================================


@dataclass
class BlockSolution:
    coefficients: tuple[int, ...]
    length_sq: Fraction
    nodes: int
    current_sq: Fraction

    @property
    def improved(self) -> bool:
        return self.length_sq < self.current_sq


def _enumerate(mu, B, radius_sq: Fraction) -> tuple[list[int] | None, Fraction, int]:
    """Shortest nonzero Σ x_i·π(b_i) with squared length ≤ radius_sq, by depth-first search."""
    k = len(B)
    x = [0] * k
    best: list[int] | None = None
    bound = radius_sq
    nodes = 0

    def recurse(level: int, partial: Fraction):
        nonlocal best, bound, nodes
        center = -sum((x[i] * mu[i][level] for i in range(level + 1, k)), Fraction(0))
        remaining = bound - partial
        if remaining < 0:
            return
        span = math.sqrt(float(remaining / B[level]))
        lo = math.ceil(center - span) - 1
        hi = math.floor(center + span) + 1
        if all(v == 0 for v in x[level + 1 :]):
            lo = max(lo, 0)  # ±v symmetry

        for value in range(lo, hi + 1):
            nodes += 1
            offset = value - center
            cost = partial + offset * offset * B[level]
            if cost > bound:
                continue
            x[level] = value
            if level > 0:
                recurse(level - 1, cost)
            elif any(x) and (cost < bound or best is None):
                best, bound = list(x), cost
        x[level] = 0

    recurse(k - 1, Fraction(0))
    return best, bound, nodes


def svp_in_block(basis: LatticeBasis, start: int, stop: int) -> BlockSolution:
    """Exact shortest vector of π_start(L[start:stop]), as coefficients over rows start..stop−1."""
    if not 0 <= start < stop <= basis.n:
        raise ValueError(f"Empty or invalid window [{start}, {stop})")
    gs = gram_schmidt(basis)
    B = list(gs.bstar_norms_sq[start:stop])
    mu = [[gs.mu[i][j] for j in range(start, stop)] for i in range(start, stop)]
    if stop - start == 1:
        return BlockSolution((1,), B[0], 1, B[0])

    volume_sq = math.prod(B, start=Fraction(1))
    gh = gaussian_heuristic_of(stop - start, volume_sq)
    radius_sq = min(B[0], Fraction((config.ENUMERATION_RADIUS_SLACK * gh) ** 2))

    best, length_sq, nodes = _enumerate(mu, B, radius_sq)
    if best is None:
        # nothing below the first vector inside the heuristic radius; make the search exact
        best, length_sq, more = _enumerate(mu, B, B[0])
        nodes += more
    return BlockSolution(tuple(best), length_sq, nodes, B[0])


# =============================================================================
# BKZ
# =============================================================================


def _insert(b: list[list[int]], start: int, coefficients) -> None:
    """Make Σ x_i·b[start+i] a basis row at position start by unimodular row operations."""
    x = list(coefficients)
    idx = list(range(start, start + len(x)))
    while sum(1 for v in x if v) > 1:
        live = sorted((i for i in range(len(x)) if x[i]), key=lambda i: abs(x[i]))
        j, i = live[0], live[-1]
        q = x[i] // x[j]
        x[i] -= q * x[j]
        b[idx[j]] = [u + q * v for u, v in zip(b[idx[j]], b[idx[i]])]
    t = next(i for i in range(len(x)) if x[i])
    if abs(x[t]) != 1:
        raise ArithmeticError(f"Coefficient vector {coefficients} is not primitive")
    row = b.pop(idx[t])
    b.insert(start, [-v for v in row] if x[t] < 0 else row)


def _block_search_bits(basis: LatticeBasis, start: int, stop: int, length_sq: Fraction) -> int:
    """Input bits a Grover search over this window would need, from dual-norm coefficient bounds."""
    block = project(basis, gram_schmidt(basis), start, stop)
    radius = math.sqrt(float(length_sq))
    return sum(coeff_bits_for(d) for d in dual_norm_bounds(block, radius))


@lru_cache(maxsize=None)
def grover_block_plan(dimension: int, seed: int = config.DEFAULT_SEED):
    """Sweep point (oracle metrics and Grover totals) for a seeded basis of one block dimension."""
    return sweep_point(dimension, seed, grover=True)


def bkz_reduce(basis: LatticeBasis, cfg: BkzConfig, backend: Backend = Backend.CLASSICAL) -> ReducedBasis:
    backend = Backend(backend)
    n = basis.n
    if cfg.beta > n:
        raise ValueError(f"Blocksize {cfg.beta} exceeds basis dimension {n}")
    delta = Fraction(str(cfg.delta))
    b = _lll_rows(basis.rows, delta)
    ledger = CostLedger()

    tours = 0
    while True:
        tours += 1
        changed = False
        for start in range(n - 1):
            stop = min(start + cfg.beta, n)
            current = LatticeBasis.from_rows(b)
            solution = svp_in_block(current, start, stop)
            improved = solution.improved

            call = SvpCall(
                tour=tours,
                start=start,
                stop=stop,
                nodes=solution.nodes,
                improved=improved,
                search_bits=_block_search_bits(current, start, stop, solution.length_sq),
            )
            if backend == Backend.GROVER_COST:
                plan = grover_block_plan(stop - start, cfg.seed)
                call.iterations = plan.iterations
                call.quantum = plan.grover_totals
            ledger.calls.append(call)

            if improved:
                _insert(b, start, solution.coefficients)
                b[: stop] = _lll_rows(b[:stop], delta)
                changed = True
                logger.debug(f"Tour {tours} window [{start}, {stop}): inserted vector of length² {solution.length_sq}")

        logger.info(f"BKZ-{cfg.beta} tour {tours} finished ({'changed' if changed else 'no change'})")
        policy = cfg.early_termination
        if policy == TerminationPolicy.NONE and tours >= cfg.max_tours:
            break
        if policy == TerminationPolicy.NO_CHANGE and not changed:
            break
        if policy == TerminationPolicy.TOUR_BUDGET and (not changed or tours >= cfg.max_tours):
            break

    reduced = LatticeBasis.from_rows(_lll_rows(b, delta))
    return ReducedBasis(reduced, tours, ledger)


# =============================================================================
# Quality Bound
# =============================================================================


def hermite_constant(beta: int) -> float:
    if beta not in HERMITE_POWERS:
        raise ValueError(f"No exact Hermite constant tabulated for dimension {beta}")
    return float(HERMITE_POWERS[beta]) ** (1 / beta)


def quality_bound(n: int, beta: int, volume: float, gamma: float | None = None) -> float:
    """γ_β^{(n−1)/(2(β−1)) + β(β−2)/(2n(β−1))}·vol^{1/n}, the BKZ-β bound on ‖b₁‖."""
    if not 2 <= beta <= n:
        raise ValueError(f"Need 2 <= beta <= n, got beta={beta}, n={n}")
    gamma = hermite_constant(beta) if gamma is None else gamma
    exponent = (n - 1) / (2 * (beta - 1)) + beta * (beta - 2) / (2 * n * (beta - 1))
    return gamma**exponent * volume ** (1 / n)


# =============================================================================
# Blocksize Crossover
# =============================================================================


def classical_log2_cost(beta: float, c: float = DEFAULT_ENUMERATION_CONSTANT) -> float:
    return c * beta * math.log2(beta)


def quantum_log2_cost(beta: float, c: float = DEFAULT_ENUMERATION_CONSTANT, extra_log2=None) -> float:
    """Half the enumeration exponent, plus log₂ of a per-iteration circuit cost when given."""
    return classical_log2_cost(beta, c) / 2 + (extra_log2(beta) if extra_log2 else 0.0)


def equivalent_quantum_beta(classical_beta: float, c: float = DEFAULT_ENUMERATION_CONSTANT, extra_log2=None) -> float:
    """Blocksize whose quantum cost equals the classical cost at classical_beta (bisection)."""
    target = classical_log2_cost(classical_beta, c)
    lo, hi = 2.0, max(4.0, 2.0 * classical_beta)
    if quantum_log2_cost(lo, c, extra_log2) > target:
        return lo
    while quantum_log2_cost(hi, c, extra_log2) < target:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if quantum_log2_cost(mid, c, extra_log2) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def crossover_analysis(
    c: float = DEFAULT_ENUMERATION_CONSTANT,
    betas=range(10, 101, 10),
    classical_beta: int = 40,
    extra_log2=None,
) -> dict:
    if c <= 0:
        raise ValueError("Enumeration constant must be positive")
    rows = [
        {
            "beta": beta,
            "classical_log2": classical_log2_cost(beta, c),
            "quantum_log2": quantum_log2_cost(beta, c, extra_log2),
        }
        for beta in betas
    ]
    return {
        "c": c,
        "classical_beta": classical_beta,
        "equivalent_quantum_beta": equivalent_quantum_beta(classical_beta, c, extra_log2),
        "measured_cost_included": extra_log2 is not None,
        "rows": rows,
    }


# =============================================================================
# Reports
# =============================================================================


def _norms(basis: LatticeBasis) -> list[float]:
    return [math.sqrt(dot(row, row)) for row in basis.rows]


def bkz_report(before: LatticeBasis, result: ReducedBasis, cfg: BkzConfig, backend: Backend) -> dict:
    n = before.n
    bound = None
    satisfied = None
    if cfg.beta in HERMITE_POWERS:
        volume = float(volume_root(before.volume_sq, 1))
        bound = quality_bound(n, cfg.beta, volume)
        satisfied = math.sqrt(result.first_vector_norm_sq) <= bound * (1 + 1e-9)
        if not satisfied:
            logger.warning(f"First vector exceeds the BKZ-{cfg.beta} quality bound {bound:.4f}")

    quantum = result.ledger.quantum_totals
    return {
        "backend": Backend(backend).value,
        "beta": cfg.beta,
        "early_termination": cfg.early_termination.value,
        "seed": cfg.seed if Backend(backend) == Backend.GROVER_COST else None,
        "input_norms": _norms(before),
        "output_norms": _norms(result.basis),
        "output_basis": [list(row) for row in result.basis.rows],
        "tours": result.tours_executed,
        "ledger": {
            "svp_calls": result.ledger.svp_calls,
            "enumeration_nodes": result.ledger.total_nodes,
            "calls": [
                {
                    "tour": c.tour,
                    "window": [c.start, c.stop],
                    "nodes": c.nodes,
                    "improved": c.improved,
                    "search_bits": c.search_bits,
                    "k": str(c.iterations) if c.iterations is not None else None,
                }
                for c in result.ledger.calls
            ],
            "quantum_totals": metrics_to_dict(quantum) if quantum else None,
        },
        "quality_bound": bound,
        "bound_satisfied": satisfied,
    }
