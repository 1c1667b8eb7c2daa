"""
Exact-diagonalization oracle for small periodic chains.

Basis convention: index = sum_l j_l 2^(n-l), site 1 is the most significant
bit. Complement is index -> 2^n - 1 - index; reversal reverses the bit string.
"""

import logging
from functools import reduce
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla

from config import DEGENERACY_TOL, MAX_DENSE_SITES, MAX_FULL_ED_SITES
from errors import NullStateError, ValidationError
from models import ChainHamiltonian, DenseState, MatrixPair, SpectrumReport, StateSymmetry, frozen_array
from mps_core import block_products, diagonal_product_decomposition
from parent_ham import assemble_chain, chain_dense, chain_matvec, chain_norm_bound, reversal_permutation

log = logging.getLogger(__name__)

_POWER_STEPS = 60


def mps_to_dense(pair: MatrixPair, n: int) -> DenseState:
    """Unnormalized amplitudes tr(A_{j1} ... A_{jn}) for every configuration"""
    if not 1 <= n <= MAX_DENSE_SITES:
        raise ValidationError(f"n: dense states need 1 <= n <= {MAX_DENSE_SITES}, got {n}")
    amplitudes = np.einsum("iaa->i", block_products(pair, n))
    if not np.any(np.abs(amplitudes) > 0):
        raise NullStateError(f"the MPS vanishes identically at n={n}")
    return DenseState(n=n, amplitudes=frozen_array(amplitudes))


def product_state(phi: np.ndarray, n: int) -> DenseState:
    return DenseState(n=n, amplitudes=frozen_array(reduce(np.kron, [np.asarray(phi, dtype=complex)] * n)))


def branch_states(pair: MatrixPair, n: int) -> List[DenseState]:
    """Product branches Phi^(x)n of a simultaneously diagonal pair, nonzero ones only"""
    branches = diagonal_product_decomposition(pair)
    if branches is None:
        return []
    return [product_state(phi, n) for phi in branches if np.linalg.norm(phi) > 0]


def _check_state(state: DenseState, n: int) -> np.ndarray:
    if state.n != n:
        raise ValidationError(f"state: expected {n} sites, got {state.n}")
    psi = np.asarray(state.amplitudes)
    if not np.linalg.norm(psi) > 0:
        raise NullStateError("state: null vector supplied to the oracle")
    return psi


def _power_norm(chain: ChainHamiltonian) -> float:
    """Deterministic power-iteration estimate of ||H||"""
    dim = 2**chain.n
    v = np.linspace(1.0, 2.0, dim).astype(complex)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(_POWER_STEPS):
        w = chain_matvec(chain, v)
        estimate = float(np.linalg.norm(w))
        if estimate == 0.0:
            break
        v = w / estimate
    return estimate


def ground_check(chain: ChainHamiltonian, states: Sequence[DenseState] = (), n_lowest: int = 8) -> SpectrumReport:
    """Lowest levels, ground-space dimension and the supplied states' energies and overlaps.

    Full diagonalization up to 12 sites; up to 14 sites only Rayleigh
    quotients and a power-iteration norm estimate are reported.
    """
    n = chain.n
    if n > MAX_DENSE_SITES:
        raise ValidationError(f"n: the oracle handles at most {MAX_DENSE_SITES} sites")
    vectors = [_check_state(s, n) for s in states]

    if n > MAX_FULL_ED_SITES:
        rayleigh = tuple(
            float(np.vdot(psi, chain_matvec(chain, psi)).real / np.vdot(psi, psi).real) for psi in vectors
        )
        estimate = _power_norm(chain)
        log.debug("n=%d Rayleigh-only mode, power estimate %.6e", n, estimate)
        return SpectrumReport(
            n=n,
            lowest=frozen_array(np.zeros(0), dtype=float),
            lambda_min=None,
            norm_bound=max(estimate, 0.0) or chain_norm_bound(chain),
            ground_dimension=None,
            rayleigh=rayleigh,
            overlaps=tuple(None for _ in vectors),
            full_diagonalization=False,
        )

    h = chain_dense(chain)
    w, v = sla.eigh(h)
    h_norm = float(max(abs(w[0]), abs(w[-1])))
    ground_dim = int(np.sum(w - w[0] <= DEGENERACY_TOL * max(h_norm, 1e-300)))
    ground = v[:, :ground_dim]

    rayleigh, overlaps = [], []
    for psi in vectors:
        norm2 = np.vdot(psi, psi).real
        rayleigh.append(float(np.vdot(psi, h @ psi).real / norm2))
        overlaps.append(float(np.linalg.norm(ground.conj().T @ psi) ** 2 / norm2))
    return SpectrumReport(
        n=n,
        lowest=frozen_array(w[:n_lowest], dtype=float),
        lambda_min=float(w[0]),
        norm_bound=h_norm,
        ground_dimension=ground_dim,
        rayleigh=tuple(rayleigh),
        overlaps=tuple(overlaps),
        full_diagonalization=True,
    )


def _phase_free_residual(psi: np.ndarray, image: np.ndarray) -> float:
    """min over |phi| = 1 of ||image - phi psi|| / ||psi||"""
    overlap = np.vdot(psi, image)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(image - phase * psi) / np.linalg.norm(psi))


def state_symmetry_check(state: DenseState) -> StateSymmetry:
    psi = np.asarray(state.amplitudes)
    if not np.linalg.norm(psi) > 0:
        raise NullStateError("state: null vector has no symmetry residual")
    return StateSymmetry(
        spin_flip_residual=_phase_free_residual(psi, psi[::-1]),
        reversal_residual=_phase_free_residual(psi, psi[reversal_permutation(state.n)]),
    )


def degeneracy_count(chain: ChainHamiltonian, n: Optional[int] = None) -> int:
    """Dimension of the zero-energy eigenspace, tolerance relative to ||H||"""
    if n is not None and n != chain.n:
        chain = assemble_chain(chain.local, n)
    w = sla.eigh(chain_dense(chain), eigvals_only=True)
    h_norm = float(max(abs(w[0]), abs(w[-1])))
    return int(np.sum(np.abs(w) <= DEGENERACY_TOL * h_norm))


def state_rank(states: Sequence[DenseState], tol: float = 1e-8) -> int:
    """Number of linearly independent states after normalization"""
    if not states:
        return 0
    stack = np.array([np.asarray(s.amplitudes) / s.norm for s in states])
    return int(np.linalg.matrix_rank(stack, tol=tol))


def export_state(state: DenseState, path: Union[str, Path]) -> Path:
    """Write amplitudes as little-endian complex128 (interleaved float64 pairs)"""
    path = Path(path)
    np.asarray(state.amplitudes, dtype="<c16").tofile(path)
    return path


def load_state(path: Union[str, Path]) -> DenseState:
    amplitudes = np.fromfile(Path(path), dtype="<c16")
    n = int(round(np.log2(max(amplitudes.size, 1))))
    if amplitudes.size != 2**n or n < 1:
        raise ValidationError(f"{path}: {amplitudes.size} amplitudes is not a power of two")
    return DenseState(n=n, amplitudes=frozen_array(amplitudes))
