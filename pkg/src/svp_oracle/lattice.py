"""
Exact lattice mathematics.

Bases are integer row matrices; every derived quantity (Gram matrix,
Gram-Schmidt data, dual basis, volume) is computed with exact rationals.
Floating values only appear when the Gaussian heuristic or the Minkowski
bound is finally evaluated.
"""

import logging
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from svp_oracle.errors import InvalidBasisError

logger = logging.getLogger(__name__)

# Decimal digits used for volume roots (well above 64 fractional bits)
_ROOT_PRECISION = 50

_PI = Decimal("3.14159265358979323846264338327950288419716939937510")
_E = Decimal("2.71828182845904523536028747135266249775724709369995")


# =============================================================================
# Data Models
# =============================================================================


@dataclass(frozen=True)
class GramSchmidtData:
    """Exact Gram-Schmidt orthogonalization of a basis."""

    bstar: tuple[tuple[Fraction, ...], ...]
    mu: tuple[tuple[Fraction, ...], ...]
    bstar_norms_sq: tuple[Fraction, ...]


@dataclass(frozen=True)
class LatticeBasis:
    """Integer basis, one basis vector per row."""

    rows: tuple[tuple[int, ...], ...]
    _gs: GramSchmidtData = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        if not rows or not rows[0]:
            raise InvalidBasisError("Basis must have at least one non-empty row")
        m = len(rows[0])
        if any(len(row) != m for row in rows):
            raise InvalidBasisError("All basis rows must have the same length")
        if len(rows) > m:
            raise InvalidBasisError(f"Basis has {len(rows)} rows in dimension {m}; rows cannot be independent")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_gs", orthogonalize(rows))

    @classmethod
    def from_rows(cls, rows) -> "LatticeBasis":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    @property
    def is_full_rank(self) -> bool:
        return self.n == self.m

    @cached_property
    def volume_sq(self) -> Fraction:
        """Squared lattice volume, the product of all ‖b*_i‖²."""
        volume = Fraction(1)
        for norm_sq in self._gs.bstar_norms_sq:
            volume *= norm_sq
        return volume


# =============================================================================
# Gram Matrix and Lengths
# =============================================================================


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def gram_matrix(basis: LatticeBasis) -> list[list[int]]:
    """G = B·Bᵀ."""
    return [[dot(bi, bj) for bj in basis.rows] for bi in basis.rows]


def combine(rows, x) -> list:
    """Linear combination Σ x_i·rows_i."""
    width = len(rows[0])
    return [sum(xi * row[col] for xi, row in zip(x, rows)) for col in range(width)]


def vector_length_sq(basis: LatticeBasis, x) -> int:
    """Squared Euclidean length of the lattice vector with coefficients x."""
    if len(x) != basis.n:
        raise ValueError(f"Coefficient vector has length {len(x)}, basis has {basis.n} rows")
    v = combine(basis.rows, x)
    return dot(v, v)


# =============================================================================
# Gram-Schmidt and Projections
# =============================================================================


def orthogonalize(rows) -> GramSchmidtData:
    """Exact Gram-Schmidt over rationals; raises on linear dependence."""
    n = len(rows)
    bstar: list[list[Fraction]] = []
    norms: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]

    for i, row in enumerate(rows):
        v = [Fraction(a) for a in row]
        for j in range(i):
            coeff = dot(row, bstar[j]) / norms[j]
            mu[i][j] = coeff
            v = [a - coeff * b for a, b in zip(v, bstar[j])]
        mu[i][i] = Fraction(1)
        norm_sq = dot(v, v)
        if norm_sq == 0:
            raise InvalidBasisError(f"Basis rows are linearly dependent (row {i})")
        bstar.append(v)
        norms.append(norm_sq)

    return GramSchmidtData(
        bstar=tuple(tuple(v) for v in bstar),
        mu=tuple(tuple(r) for r in mu),
        bstar_norms_sq=tuple(norms),
    )


def gram_schmidt(basis: LatticeBasis) -> GramSchmidtData:
    return basis._gs


def project(basis: LatticeBasis, gs: GramSchmidtData, start: int, stop: int) -> list[list[Fraction]]:
    """Rows π_start(b_start), …, π_start(b_{stop-1}), with 0-based indices.

    π_start removes the components along b*_0 … b*_{start-1}.
    """
    if not 0 <= start <= stop <= basis.n:
        raise IndexError(f"Projection window [{start}, {stop}) outside basis of {basis.n} rows")

    projected = []
    for k in range(start, stop):
        v = list(gs.bstar[k])
        for t in range(start, k):
            v = [a + gs.mu[k][t] * b for a, b in zip(v, gs.bstar[t])]
        projected.append(v)
    return projected


# =============================================================================
# Volume-Derived Estimates
# =============================================================================


def volume_root(volume_sq: Fraction, rank: int) -> Decimal:
    """vol^(1/rank) evaluated in high precision from the squared volume."""
    with localcontext() as ctx:
        ctx.prec = _ROOT_PRECISION
        vol_sq = Decimal(volume_sq.numerator) / Decimal(volume_sq.denominator)
        return (vol_sq.ln() / (2 * rank)).exp()


def gaussian_heuristic_of(rank: int, volume_sq: Fraction) -> float:
    """√(rank/(2πe))·vol^(1/rank) for an arbitrary-rank lattice."""
    with localcontext() as ctx:
        ctx.prec = _ROOT_PRECISION
        factor = (Decimal(rank) / (2 * _PI * _E)).sqrt()
        return float(factor * volume_root(volume_sq, rank))


def _require_full_rank(basis: LatticeBasis):
    if not basis.is_full_rank:
        raise InvalidBasisError(f"Expected a full-rank basis, got {basis.n}x{basis.m}")


def gaussian_heuristic(basis: LatticeBasis) -> float:
    """Expected length of the shortest vector of a random lattice."""
    _require_full_rank(basis)
    return gaussian_heuristic_of(basis.n, basis.volume_sq)


def minkowski_bound(basis: LatticeBasis) -> float:
    """Minkowski's upper bound √n·vol^(1/n) on λ₁."""
    _require_full_rank(basis)
    with localcontext() as ctx:
        ctx.prec = _ROOT_PRECISION
        return float(Decimal(basis.n).sqrt() * volume_root(basis.volume_sq, basis.n))


# =============================================================================
# Dual Basis
# =============================================================================


def invert(matrix) -> list[list[Fraction]]:
    """Exact Gauss-Jordan inverse of a square rational matrix."""
    size = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(matrix)]

    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            raise InvalidBasisError("Singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        scale = aug[col][col]
        aug[col] = [v / scale for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]

    return [row[size:] for row in aug]


def dual_rows(rows) -> list[list[Fraction]]:
    """(R·Rᵀ)⁻¹·R for any list of independent rational rows."""
    gram = [[dot(a, b) for b in rows] for a in rows]
    inverse = invert(gram)
    return [combine(rows, coeffs) for coeffs in inverse]


def dual_basis(basis: LatticeBasis) -> list[list[Fraction]]:
    _require_full_rank(basis)
    return dual_rows(basis.rows)


# =============================================================================
# Basis Text Format
# =============================================================================


def parse_basis(text: str) -> LatticeBasis:
    """Parse `n m` followed by n rows of m integers; `#` starts a comment line."""
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise InvalidBasisError("Basis text is empty")

    try:
        n, m = (int(tok) for tok in lines[0].split())
        rows = [tuple(int(tok) for tok in line.split()) for line in lines[1:]]
    except ValueError as e:
        raise InvalidBasisError(f"Malformed basis text: {e}") from e

    if len(rows) != n or any(len(row) != m for row in rows):
        raise InvalidBasisError(f"Header declares {n}x{m} but body does not match")
    return LatticeBasis.from_rows(rows)


def format_basis(basis: LatticeBasis) -> str:
    lines = [f"{basis.n} {basis.m}"]
    lines.extend(" ".join(str(v) for v in row) for row in basis.rows)
    return "\n".join(lines) + "\n"


def read_basis(path: Path) -> LatticeBasis:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InvalidBasisError(f"Cannot read basis file {path}: {e}") from e
    basis = parse_basis(text)
    logger.info(f"Loaded {basis.n}x{basis.m} basis from {path}")
    return basis


def write_basis(basis: LatticeBasis, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_basis(basis))
    return path
