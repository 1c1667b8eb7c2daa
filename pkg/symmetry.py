"""
Spin-flip and parity witnesses for a matrix pair.

Convention: a spin-flip witness X satisfies X A_i X^-1 = eps A_(1-i), a
parity witness Omega satisfies Omega A_i Omega^-1 = sigma A_i^T. Both are
found as null vectors of the row-major vectorized linear conditions

    vec(X A) = kron(I, A^T) vec(X),    vec(B X) = kron(B, I) vec(X).
"""

import logging
from itertools import combinations
from typing import List, Optional, Union

import numpy as np

from config import NULL_TOL, WITNESS_TOL, ZERO_TOL
from errors import SingularMatrixError
from models import InvariantReport, MatrixPair, ParityWitness, SpinFlipWitness
from numerics import kron, left_null_space

log = logging.getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_MIN_DET = 1e-8
SIGNS = (1, -1)

Witness = Union[SpinFlipWitness, ParityWitness]


def invariant_check(pair: MatrixPair, tol: float = 1e-9) -> InvariantReport:
    """tr A0 = eps tr A1 and det A0 = det A1, the necessary witness conditions"""
    scale = pair.scale
    t0, t1 = np.trace(pair.a0), np.trace(pair.a1)
    trace_sign = None
    for eps in SIGNS:
        if abs(t0 - eps * t1) <= tol * scale:
            trace_sign = eps
            break
    det_ok = bool(abs(np.linalg.det(pair.a0) - np.linalg.det(pair.a1)) <= tol * scale**2)
    return InvariantReport(trace_sign=trace_sign, det_ok=det_ok)


def _phase_fix(x: np.ndarray) -> np.ndarray:
    """Unit Frobenius norm, first significant entry positive real"""
    x = x / np.linalg.norm(x)
    flat = x.reshape(-1)
    lead = np.flatnonzero(np.abs(flat) > 1e-12)[0]
    return x * (abs(flat[lead]) / flat[lead])


def select_invertible(null_rows: np.ndarray) -> Optional[np.ndarray]:
    """Most invertible 2x2 matrix in the span of the given null vectors.

    Candidates are the basis vectors and the normalized combinations
    (N_i +- N_j)/sqrt2, (N_i +- i N_j)/sqrt2; the winner maximizes |det|
    at unit Frobenius norm and must clear a fixed floor.
    """
    rows = [np.asarray(r, dtype=complex) for r in null_rows]
    candidates = list(rows)
    for a, b in combinations(rows, 2):
        for coeff in (1, -1, 1j, -1j):
            candidates.append((a + coeff * b) / np.sqrt(2))

    best, best_det = None, 0.0
    for vec in candidates:
        norm = np.linalg.norm(vec)
        if norm <= ZERO_TOL:
            continue
        mat = (vec / norm).reshape(2, 2)
        det = abs(np.linalg.det(mat))
        if det > best_det + 1e-14:
            best, best_det = mat, det
    if best is None or best_det <= _MIN_DET:
        return None
    return _phase_fix(best)


def _spin_flip_system(pair: MatrixPair, eps: int) -> np.ndarray:
    a0, a1 = pair.matrices
    return np.vstack([
        kron(_I2, a0.T) - eps * kron(a1, _I2),
        kron(_I2, a1.T) - eps * kron(a0, _I2),
    ])


def _parity_system(pair: MatrixPair, sigma: int) -> np.ndarray:
    return np.vstack([kron(_I2, a.T) - sigma * kron(a.T, _I2) for a in pair.matrices])


def _solve(system: np.ndarray, tol: float) -> Optional[np.ndarray]:
    # right null vectors of the system are left null vectors of its transpose
    null_rows = left_null_space(system.T, tol)
    log.debug("witness system null dimension %d", len(null_rows))
    if len(null_rows) == 0:
        return None
    return select_invertible(null_rows)


def spin_flip_witnesses(pair: MatrixPair, tol: float = NULL_TOL) -> List[SpinFlipWitness]:
    """All signs eps for which a spin-flip witness exists, eps=+1 first"""
    found = []
    for eps in SIGNS:
        x = _solve(_spin_flip_system(pair, eps), tol)
        if x is None:
            continue
        witness = SpinFlipWitness(x=x, epsilon=eps)
        if verify_witness(pair, witness) <= WITNESS_TOL:
            found.append(witness)
        else:
            log.debug("spin-flip candidate eps=%d rejected on residual", eps)
    return found


def find_spin_flip_witness(pair: MatrixPair, tol: float = NULL_TOL) -> Optional[SpinFlipWitness]:
    found = spin_flip_witnesses(pair, tol)
    return found[0] if found else None


def parity_witnesses(pair: MatrixPair, tol: float = NULL_TOL) -> List[ParityWitness]:
    found = []
    for sigma in SIGNS:
        omega = _solve(_parity_system(pair, sigma), tol)
        if omega is None:
            continue
        witness = ParityWitness(omega=omega, sigma=sigma)
        if verify_witness(pair, witness) <= WITNESS_TOL:
            found.append(witness)
    return found


def find_parity_witness(pair: MatrixPair, tol: float = NULL_TOL) -> Optional[ParityWitness]:
    found = parity_witnesses(pair, tol)
    return found[0] if found else None


def verify_witness(pair: MatrixPair, witness: Witness) -> float:
    """Max residual of the defining equations, relative to max(1, ||A||)"""
    if isinstance(witness, SpinFlipWitness):
        w, sign = np.asarray(witness.x, dtype=complex), witness.epsilon
        targets = (pair.a1, pair.a0)
    else:
        w, sign = np.asarray(witness.omega, dtype=complex), witness.sigma
        targets = (pair.a0.T, pair.a1.T)

    if abs(np.linalg.det(w)) <= 1e-12 * np.linalg.norm(w) ** 2:
        raise SingularMatrixError("witness: matrix is singular")
    w_inv = np.linalg.inv(w)
    denom = max(1.0, pair.scale)
    return float(max(
        np.linalg.norm(w @ a @ w_inv - sign * t) / denom
        for a, t in zip(pair.matrices, targets)
    ))
