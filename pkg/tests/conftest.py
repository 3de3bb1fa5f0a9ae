"""
Pytest configuration and shared fixtures.
"""

import pytest

from svp_oracle.lattice import LatticeBasis


@pytest.fixture
def worked_basis():
    """Provide the 2-dimensional example basis with λ₁² = 5."""
    return LatticeBasis.from_rows([[2, 1], [1, 3]])


@pytest.fixture
def identity_basis():
    """Provide the 2-dimensional identity basis."""
    return LatticeBasis.from_rows([[1, 0], [0, 1]])


@pytest.fixture
def rank_one_basis():
    """Provide a one-dimensional lattice 3ℤ."""
    return LatticeBasis.from_rows([[3]])


@pytest.fixture
def basis_file(tmp_path):
    """Write the worked example basis to a text file."""
    path = tmp_path / "worked.txt"
    path.write_text("# worked example\n2 2\n2 1\n1 3\n")
    return path


@pytest.fixture
def worked_oracle(worked_basis):
    """Synthesize the oracle for the worked example with d=2 and tau=5."""
    from svp_oracle.oracle import BoundMethod, ThresholdSource, choose_threshold, derive_bounds, synthesize_oracle

    encoding = derive_bounds(worked_basis, BoundMethod.UNIFORM, 2)
    threshold = choose_threshold(worked_basis, ThresholdSource.EXPLICIT, t_sq=5)
    return synthesize_oracle(worked_basis, encoding, threshold)
