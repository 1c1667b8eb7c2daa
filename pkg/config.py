"""
Runtime configuration for the MPS2 toolkit
"""

import os
from dotenv import load_dotenv

load_dotenv()


def _float_env(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _int_env(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


# Configuration
NULL_TOL = _float_env("MPS2_NULL_TOL", 1e-10)
DEGENERACY_TOL = _float_env("MPS2_DEGENERACY_TOL", 1e-9)
DIAG_TOL = _float_env("MPS2_DIAG_TOL", 1e-8)
DEFECT_COND = _float_env("MPS2_DEFECT_COND", 1e8)
WITNESS_TOL = 1e-9
ZERO_TOL = 1e-12
DEFECTIVE_FALLBACK_N = _int_env("MPS2_DEFECTIVE_FALLBACK_N", 512)
KINK_FACTOR = _float_env("MPS2_KINK_FACTOR", 10.0)
LOG_LEVEL = os.getenv("MPS2_LOG_LEVEL", "WARNING").upper()

# Dense limits
MAX_DENSE_DIM = 4096
MAX_FULL_ED_SITES = 12
MAX_DENSE_SITES = 14
MAX_NULL_K = 12
DEFAULT_K_MAX = 6


def worker_count() -> int:
    """Worker cap for grid sweeps, read on every call so tests can patch the env"""
    value = os.getenv("MPS2_THREADS")
    if value in (None, ""):
        return os.cpu_count() or 1
    return max(1, int(value))
