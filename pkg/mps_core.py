"""
Translationally invariant spin-1/2 MPS with 2x2 auxiliary matrices.

Amplitudes are unnormalized traces tr(A_{i1} ... A_{iN}); Z and every power
of the transfer matrix are carried in scaled form (mantissa, log-scale) and
normalization happens only where an expectation value is returned.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFECTIVE_FALLBACK_N, DEGENERACY_TOL, MAX_DENSE_SITES, ZERO_TOL
from errors import DefectiveSpectrumError, NullStateError, ValidationError
from models import (
    EvaluationMode,
    MatrixPair,
    NormZ,
    SiteOperator,
    TransferMatrix,
    frozen_array,
)
from numerics import eig, hermitize, kron, power_scaled

log = logging.getLogger(__name__)

# Z below this fraction of the scaled mantissa counts as a vanishing state
_NULL_Z = 1e-30
_OVERLAP_TOL = 1e-10
_NILPOTENT_TOL = 64 * np.finfo(float).eps


def transfer_matrix(pair: MatrixPair) -> TransferMatrix:
    e = kron(pair.a0.conj(), pair.a0) + kron(pair.a1.conj(), pair.a1)
    spectrum = eig(e)
    mods = np.abs(spectrum.eigenvalues)
    degeneracy = int(np.sum(np.abs(mods - mods[0]) <= DEGENERACY_TOL * mods[0]))
    return TransferMatrix(e=frozen_array(e), spectrum=spectrum, degeneracy_of_max=degeneracy)


def _parse_config(config: Union[str, Sequence[int]]) -> Tuple[int, ...]:
    if isinstance(config, str):
        if any(ch not in "01" for ch in config):
            raise ValidationError(f"config: expected a bit string, got {config!r}")
        bits = tuple(int(ch) for ch in config)
    else:
        bits = tuple(int(b) for b in config)
        if any(b not in (0, 1) for b in bits):
            raise ValidationError("config: entries must be 0 or 1")
    if not bits:
        raise ValidationError("config: configuration must contain at least one site")
    return bits


def amplitude(pair: MatrixPair, config: Union[str, Sequence[int]]) -> complex:
    """tr(A_{i1} ... A_{iN}), no 1/sqrt(Z)"""
    bits = _parse_config(config)
    product = np.eye(2, dtype=complex)
    for b in bits:
        product = product @ pair[b]
    return complex(np.trace(product))


def block_products(pair: MatrixPair, k: int) -> np.ndarray:
    """All 2^k products A_{j1} ... A_{jk}, shape (2^k, 2, 2), site 1 the most significant bit"""
    if k < 1:
        raise ValidationError(f"k: block size must be >= 1, got {k}")
    base = np.stack([pair.a0, pair.a1])
    products = base
    for _ in range(k - 1):
        products = np.einsum("iab,jbc->ijac", products, base).reshape(-1, 2, 2)
    return products


def norm_Z(pair: MatrixPair, n: int) -> NormZ:
    if n < 1:
        raise ValidationError(f"n: chain length must be >= 1, got {n}")
    tm = transfer_matrix(pair)
    p, s = power_scaled(tm.e, n)
    mantissa = float(np.trace(p).real)
    if not np.isfinite(s) or mantissa <= _NULL_Z:
        raise NullStateError(f"Z = tr(E^{n}) vanishes: the MPS is the null state at n={n}")
    return NormZ(log_scale=float(s), mantissa=mantissa)


def operator_transfer(pair: MatrixPair, o: SiteOperator) -> np.ndarray:
    """E_O = sum_ij <i|O|j> conj(A_i) (x) A_j"""
    e_o = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            if o.op[i, j] != 0:
                e_o += o.op[i, j] * kron(pair[i].conj(), pair[j])
    return e_o


def _scaled_trace(factors: Sequence[Tuple[np.ndarray, float]]) -> Tuple[complex, float]:
    """tr of the product of exp(s_i) * P_i, returned as (mantissa, log-scale)"""
    product = np.eye(4, dtype=complex)
    log_scale = 0.0
    for p, s in factors:
        if not np.isfinite(s):
            return 0j, 0.0
        product = product @ p
        log_scale += s
    return complex(np.trace(product)), log_scale


def _finite_ratio(pair: MatrixPair, factors, n: int) -> complex:
    z = norm_Z(pair, n)
    mantissa, log_scale = _scaled_trace(factors)
    if mantissa == 0:
        return 0j
    return mantissa * np.exp(log_scale - z.log_scale) / z.mantissa


def _check_spectral(tm: TransferMatrix, defective_fallback: bool) -> bool:
    """True when the caller should switch to finite traces"""
    if not tm.spectrum.is_defective:
        return False
    if not defective_fallback:
        raise DefectiveSpectrumError(
            "transfer matrix is defective: spectral formulas do not apply, use finite mode"
        )
    log.warning("defective transfer matrix, falling back to finite n=%d", DEFECTIVE_FALLBACK_N)
    return True


def _require_leading(tm: TransferMatrix) -> None:
    # a 4x4 matrix is nilpotent iff its fourth power vanishes
    scale = float(np.linalg.norm(tm.e, 2))
    if scale == 0.0 or np.linalg.norm(np.linalg.matrix_power(tm.e / scale, 4), 2) <= _NILPOTENT_TOL:
        raise NullStateError("transfer matrix is nilpotent: the state vanishes in the thermodynamic limit")


def _leading_group(tm: TransferMatrix) -> np.ndarray:
    return np.arange(tm.degeneracy_of_max)


def _subleading_group(tm: TransferMatrix) -> np.ndarray:
    """Indices of the largest eigenvalue modulus below |lambda_max|"""
    mods = np.abs(tm.spectrum.eigenvalues)
    rest = np.arange(tm.degeneracy_of_max, len(mods))
    if rest.size == 0:
        return rest
    top = mods[rest[0]]
    return rest[np.abs(mods[rest] - top) <= DEGENERACY_TOL * max(top, mods[0] * ZERO_TOL)]


def expectation(
    pair: MatrixPair,
    o: SiteOperator,
    mode: EvaluationMode = EvaluationMode.THERMODYNAMIC,
    n: Optional[int] = None,
    site: int = 1,
    defective_fallback: bool = False,
) -> complex:
    """One-point function <O(site)>.

    finite: tr(E^{k-1} E_O E^{n-k}) / tr(E^n).
    thermodynamic: <l_a|E_O|r_a> / lambda_a averaged over the g-fold degenerate
    leading subspace. The 1/g makes the identity operator give exactly 1, which
    is the n -> infinity limit of the finite ratio when g leading terms survive.
    Raises NullStateError when E is nilpotent.
    """
    e_o = operator_transfer(pair, o)
    if mode is EvaluationMode.FINITE:
        if n is None or not 1 <= site <= n:
            raise ValidationError(f"site: need 1 <= site <= n, got site={site}, n={n}")
        tm = transfer_matrix(pair)
        factors = [power_scaled(tm.e, site - 1), (e_o, 0.0), power_scaled(tm.e, n - site)]
        return _finite_ratio(pair, factors, n)

    if mode is not EvaluationMode.THERMODYNAMIC:
        raise ValidationError(f"mode: {mode.value} is not available for one-point functions")

    tm = transfer_matrix(pair)
    _require_leading(tm)
    if _check_spectral(tm, defective_fallback):
        return expectation(pair, o, EvaluationMode.FINITE, n=DEFECTIVE_FALLBACK_N, site=1)

    spec = tm.spectrum
    total = 0j
    for a in _leading_group(tm):
        l, r = spec.left_vectors[:, a], spec.right_vectors[:, a]
        total += (l.conj() @ e_o @ r) / spec.eigenvalues[a]
    return complex(total / tm.degeneracy_of_max)


def _spectral_two_point(tm: TransferMatrix, e_o: np.ndarray, r: int, inner: np.ndarray) -> complex:
    spec = tm.spectrum
    lam, left, right = spec.eigenvalues, spec.left_vectors, spec.right_vectors
    total = 0j
    for a in _leading_group(tm):
        for i in inner:
            weight = np.power(lam[i], r - 2) / np.power(lam[a], r)
            total += weight * (left[:, a].conj() @ e_o @ right[:, i]) * (left[:, i].conj() @ e_o @ right[:, a])
    return complex(total / tm.degeneracy_of_max)


def two_point(
    pair: MatrixPair,
    o: SiteOperator,
    r: int,
    mode: EvaluationMode = EvaluationMode.THERMODYNAMIC,
    n: Optional[int] = None,
    defective_fallback: bool = False,
) -> complex:
    """<O(1) O(r)>; asymptotic mode gives the lambda_1 term of the connected correlator"""
    if r < 2:
        raise ValidationError(f"r: separation must be >= 2, got {r}")
    e_o = operator_transfer(pair, o)
    tm = transfer_matrix(pair)

    if mode is EvaluationMode.FINITE:
        if n is None or r > n:
            raise ValidationError(f"r: need r <= n in finite mode, got r={r}, n={n}")
        factors = [(e_o, 0.0), power_scaled(tm.e, r - 2), (e_o, 0.0), power_scaled(tm.e, n - r)]
        return _finite_ratio(pair, factors, n)

    _require_leading(tm)
    if _check_spectral(tm, defective_fallback):
        if mode is EvaluationMode.ASYMPTOTIC:
            raise DefectiveSpectrumError("asymptotic correlator needs a diagonalizable transfer matrix")
        return two_point(pair, o, r, EvaluationMode.FINITE, n=DEFECTIVE_FALLBACK_N)

    if mode is EvaluationMode.THERMODYNAMIC:
        inner = np.arange(len(tm.spectrum.eigenvalues))
    else:
        inner = _subleading_group(tm)
    return _spectral_two_point(tm, e_o, r, inner)


def connected_two_point(pair: MatrixPair, o: SiteOperator, r: int, defective_fallback: bool = False) -> complex:
    full = two_point(pair, o, r, EvaluationMode.THERMODYNAMIC, defective_fallback=defective_fallback)
    one = expectation(pair, o, EvaluationMode.THERMODYNAMIC, defective_fallback=defective_fallback)
    return full - one * one


def correlation_length(pair: MatrixPair, o: Optional[SiteOperator] = None) -> float:
    """xi = 1 / ln(|lambda_max| / |lambda_1|); +inf for a degenerate leading modulus"""
    tm = transfer_matrix(pair)
    lam = tm.spectrum.eigenvalues
    lead = abs(lam[0])
    if tm.degeneracy_of_max > 1:
        return float("inf")

    candidates = np.arange(1, len(lam))
    if o is not None:
        if tm.spectrum.is_defective:
            raise DefectiveSpectrumError("operator-resolved correlation length needs a diagonalizable E")
        e_o = operator_transfer(pair, o)
        threshold = _OVERLAP_TOL * max(np.linalg.norm(e_o, 2), ZERO_TOL)
        r0 = tm.spectrum.right_vectors[:, 0]
        kept = []
        for i in candidates:
            li = tm.spectrum.left_vectors[:, i]
            element = abs(li.conj() @ e_o @ r0) / (np.linalg.norm(li) * np.linalg.norm(r0))
            if element > threshold:
                kept.append(i)
        candidates = np.array(kept, dtype=int)
        if candidates.size == 0:
            return 0.0

    sub = abs(lam[candidates[0]])
    if sub <= ZERO_TOL * lead:
        return 0.0
    if sub >= lead * (1 - DEGENERACY_TOL):
        return float("inf")
    return float(1.0 / np.log(lead / sub))


def reduced_density_matrix(pair: MatrixPair, k: int, n: int) -> np.ndarray:
    """rho_k of k consecutive sites of the periodic n-site chain"""
    if not 1 <= k <= n <= MAX_DENSE_SITES:
        raise ValidationError(f"k, n: need 1 <= k <= n <= {MAX_DENSE_SITES}, got k={k}, n={n}")
    z = norm_Z(pair, n)
    tm = transfer_matrix(pair)
    block = block_products(pair, k)
    rest, rest_log = power_scaled(tm.e, n - k)
    # rest[(d, b), (c, a)] = sum over environments conj(M[d, c]) M[b, a]
    f4 = rest.reshape(2, 2, 2, 2)
    g = np.einsum("iab,dbca->idc", block, f4)
    rho = np.einsum("idc,jcd->ij", g, block.conj())
    rho *= np.exp(rest_log - z.log_scale) / z.mantissa
    return hermitize(rho)


def gauge_transform(pair: MatrixPair, u, mu: complex) -> MatrixPair:
    """A_i -> mu U A_i U^-1"""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValidationError(f"u: expected a 2x2 matrix, got shape {u.shape}")
    if abs(np.linalg.det(u)) <= 1e-12 * np.linalg.norm(u) ** 2:
        raise ValidationError("u: gauge matrix is singular")
    if mu == 0:
        raise ValidationError("mu: gauge scale must be nonzero")
    u_inv = np.linalg.inv(u)
    return MatrixPair(mu * u @ pair.a0 @ u_inv, mu * u @ pair.a1 @ u_inv)


def diagonal_product_decomposition(pair: MatrixPair) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Branch states Phi_m = A0[m,m]|0> + A1[m,m]|1> when both matrices are diagonal.

    Then the unnormalized state is Phi_1^(x)N + Phi_2^(x)N.
    """
    tol = 1e-12 * pair.scale
    off = [abs(a[0, 1]) for a in pair.matrices] + [abs(a[1, 0]) for a in pair.matrices]
    if max(off) >= tol:
        return None
    phi1 = np.array([pair.a0[0, 0], pair.a1[0, 0]], dtype=complex)
    phi2 = np.array([pair.a0[1, 1], pair.a1[1, 1]], dtype=complex)
    return phi1, phi2
