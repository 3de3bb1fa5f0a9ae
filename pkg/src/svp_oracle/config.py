"""
Configuration module for the SVP oracle toolkit.

Contains simulation caps, reduction defaults and output locations.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# =============================================================================
# Logging Configuration
# =============================================================================

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = Path("logs/svp_oracle.log")

# =============================================================================
# Output Configuration
# =============================================================================

REPORT_DIR = Path(os.getenv("SVP_ORACLE_REPORT_DIR", "reports"))

# =============================================================================
# Simulation Caps
# =============================================================================

EXHAUSTION_BITS = int(os.getenv("SVP_ORACLE_EXHAUSTION_BITS", "26"))  # input bits
BRUTE_FORCE_CAP = int(os.getenv("SVP_ORACLE_BRUTE_FORCE_CAP", str(2**26)))  # patterns
STATEVECTOR_MAX_QUBITS = int(os.getenv("SVP_ORACLE_STATEVECTOR_MAX_QUBITS", "24"))

# =============================================================================
# Search and Reduction Defaults
# =============================================================================

DEFAULT_SEED = int(os.getenv("SVP_ORACLE_SEED", "2024"))
DEFAULT_SOLUTION_COUNT = 3  # Grover M
DEFAULT_LLL_DELTA = 0.99
ENUMERATION_RADIUS_SLACK = 1.05  # times the projected Gaussian heuristic

# =============================================================================
# Sweep and Fit Settings
# =============================================================================

SWEEP_ENTRY_RANGE = 10  # basis entries drawn from [-10, 10]
DEFAULT_SWEEP_DIMS = (2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 30, 35, 40, 45, 50)
DEFAULT_EXTRAPOLATION_TARGETS = (186, 400)
FIT_RELATIVE_TOLERANCE = 0.05
