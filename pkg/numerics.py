"""
Dense complex linear-algebra kernel.

Every spectral quantity in the toolkit goes through `eig`, so its sort order
(modulus, then real part, then imaginary part, all descending) is the single
tie-breaking rule downstream code relies on.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.linalg as sla

from config import DEFECT_COND, MAX_DENSE_DIM, NULL_TOL
from errors import ValidationError
from models import EigenDecomposition, frozen_array

log = logging.getLogger(__name__)

# digits kept when comparing eigenvalues for ordering
_SORT_DIGITS = 10


def as_square(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name}: expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: entries must be finite")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) equals a[i, j] * b"""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def sort_order(values: np.ndarray) -> np.ndarray:
    """Indices ordering values by modulus, real part, imaginary part, all descending"""
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.arange(0)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    mod = np.round(np.abs(values) / scale, _SORT_DIGITS)
    re = np.round(values.real / scale, _SORT_DIGITS)
    im = np.round(values.imag / scale, _SORT_DIGITS)
    # lexsort uses the last key as primary
    return np.lexsort((-im, -re, -mod))


def eig(m) -> EigenDecomposition:
    m = as_square(m)
    if m.shape[0] > MAX_DENSE_DIM:
        raise ValidationError(f"matrix: dimension {m.shape[0]} exceeds {MAX_DENSE_DIM}")

    w, vl, vr = sla.eig(m, left=True, right=True)
    order = sort_order(w)
    w, vl, vr = w[order], vl[:, order], vr[:, order]

    cond = np.linalg.cond(vr)
    is_defective = bool(not np.isfinite(cond) or cond > DEFECT_COND)
    if is_defective:
        log.debug("eigenbasis flagged defective, cond=%.3e", cond)
        left = vl
    else:
        left = np.linalg.inv(vr).conj().T

    return EigenDecomposition(
        eigenvalues=frozen_array(w),
        right_vectors=frozen_array(vr),
        left_vectors=frozen_array(left),
        is_defective=is_defective,
    )


def left_null_space(m, tol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal rows c with c @ m = 0.

    Rank is the number of singular values above tol * sigma_max; a zero
    matrix has the full space as its null space.
    """
    if not 0 < tol < 1:
        raise ValidationError(f"tol: must lie in (0, 1), got {tol}")
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    rows = m.shape[0]
    _, s, vh = np.linalg.svd(m.T, full_matrices=True)
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        return np.eye(rows, dtype=complex)
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj()


def _renormalize(p: np.ndarray, log_scale: float) -> Tuple[np.ndarray, float]:
    norm = float(np.linalg.norm(p, np.inf))
    if norm == 0.0 or not np.isfinite(norm):
        return np.zeros_like(p), -np.inf
    return p / norm, log_scale + np.log(norm)


def power_scaled(m, n: int) -> Tuple[np.ndarray, float]:
    """Return (P, s) with m**n = exp(s) * P and ||P||_inf = 1.

    Repeated squaring, renormalizing after every product so large chains
    neither overflow nor underflow. A nilpotent power gives (0, -inf).
    """
    m = as_square(m)
    if n < 0:
        raise ValidationError(f"n: exponent must be non-negative, got {n}")
    if n == 0:
        return np.eye(m.shape[0], dtype=complex), 0.0

    result, result_log = None, 0.0
    base, base_log = _renormalize(m, 0.0)
    while True:
        if n & 1:
            if result is None:
                result, result_log = base, base_log
            else:
                result, result_log = _renormalize(result @ base, result_log + base_log)
        n >>= 1
        if not n:
            break
        base, base_log = _renormalize(base @ base, 2 * base_log)
    return result, result_log


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)
