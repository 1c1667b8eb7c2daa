"""
Parent Hamiltonians from the null space of the k-site matrix-product system.

A ket |e> with <e|(A_{j1}...A_{jk})> = 0 for every block annihilates every k-site
window of the MPS, so any positive combination of such projectors, summed
periodically, has the MPS as a zero-energy ground state.
"""

import logging
from functools import reduce
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_K_MAX, MAX_DENSE_SITES, MAX_FULL_ED_SITES, MAX_NULL_K, NULL_TOL
from errors import ValidationError, WitnessInconsistencyError
from models import (
    PAULI,
    ChainHamiltonian,
    FamilyFit,
    LocalHamiltonian,
    MatrixPair,
    NullSpaceBasis,
    OrbitMode,
    ParityWitness,
    PauliComparison,
    PauliDecomposition,
    SpinFlipWitness,
    SymmetryOrbits,
    frozen_array,
)
from mps_core import block_products
from numerics import hermitize, left_null_space

log = logging.getLogger(__name__)

_SUPPORT_TOL = 1e-9
_CLOSURE_TOL = 1e-8
_CANDIDATE_CAP = 20000
_COMPARISON_FLAG = 1e-8


def null_space_basis(pair: MatrixPair, k: int, tol: float = NULL_TOL) -> NullSpaceBasis:
    """Orthonormal kets |e> with sum_J conj(e_J) A_J = 0 over all k-site blocks"""
    if not 1 <= k <= MAX_NULL_K:
        raise ValidationError(f"k: block size must lie in [1, {MAX_NULL_K}], got {k}")
    system = block_products(pair, k).reshape(2**k, 4)
    coefficients = left_null_space(system, tol)
    log.debug("k=%d null space dimension %d", k, len(coefficients))
    return NullSpaceBasis(k=k, vectors=frozen_array(coefficients.conj()), tol=tol)


def interaction_range(pair: MatrixPair, k_max: int = DEFAULT_K_MAX, tol: float = NULL_TOL) -> Optional[int]:
    """Smallest k <= k_max with a nontrivial null space"""
    for k in range(1, min(k_max, MAX_NULL_K) + 1):
        if null_space_basis(pair, k, tol).dimension > 0:
            return k
    return None


# Symmetry orbits
def flip_permutation(k: int) -> np.ndarray:
    """Index map of the bitwise complement on k sites"""
    return (2**k - 1) - np.arange(2**k)


def reversal_permutation(k: int) -> np.ndarray:
    """Index map of the site reversal on k sites (site 1 is the most significant bit)"""
    idx = np.arange(2**k)
    out = np.zeros_like(idx)
    for bit in range(k):
        out |= ((idx >> bit) & 1) << (k - 1 - bit)
    return out


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    lead = np.flatnonzero(np.abs(v) > _SUPPORT_TOL)[0]
    return v * (abs(v[lead]) / v[lead])


def _same_ray(v: np.ndarray, w: np.ndarray) -> bool:
    return abs(np.vdot(v, w)) > 1 - 1e-9


def _support(v: np.ndarray) -> Tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.abs(v) > _SUPPORT_TOL * np.max(np.abs(v))))


def _sparse_candidates(span: np.ndarray) -> Optional[List[np.ndarray]]:
    """Minimal-support vectors of a column span, sorted by support size then support.

    A vector with d-1 prescribed zeros in a d-dimensional span is unique up to
    scale when it exists; enumerating zero sets finds every circuit.
    """
    n_rows, d = span.shape
    if d == 1:
        return [_phase_normalize(span[:, 0])]
    if comb(n_rows, d - 1) > _CANDIDATE_CAP:
        return None
    found: List[np.ndarray] = []
    for zeros in combinations(range(n_rows), d - 1):
        null = left_null_space(span[list(zeros), :].T)
        if len(null) != 1:
            continue
        v = _phase_normalize(span @ null[0])
        if not any(_same_ray(v, w) for w in found):
            found.append(v)
    found.sort(key=lambda v: (len(_support(v)), _support(v)))
    return found


def _independent(vectors: Sequence[np.ndarray]) -> bool:
    return np.linalg.matrix_rank(np.array(vectors), tol=1e-8) == len(vectors)


def _orbit_of(v: np.ndarray, group: Sequence[np.ndarray]) -> List[np.ndarray]:
    images: List[np.ndarray] = []
    for perm in group:
        w = _phase_normalize(v[perm])
        if not any(_same_ray(w, x) for x in images):
            images.append(w)
    return images


def _group(actions: Sequence[np.ndarray]) -> List[np.ndarray]:
    """All products of the commuting involutions, identity first"""
    size = len(actions[0]) if actions else 0
    elements = [np.arange(size)] if actions else []
    for perm in actions:
        elements = elements + [e[perm] for e in elements]
    return elements


def _greedy_orbits(candidates, group, d) -> Optional[Tuple[List[np.ndarray], List[Tuple[int, ...]]]]:
    chosen: List[np.ndarray] = []
    orbits: List[Tuple[int, ...]] = []
    for v in candidates:
        orbit = _orbit_of(v, group) if group else [v]
        if _independent(chosen + orbit):
            orbits.append(tuple(range(len(chosen), len(chosen) + len(orbit))))
            chosen.extend(orbit)
        if len(chosen) == d:
            return chosen, orbits
    return None


def _adapted(span: np.ndarray, actions: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Joint eigenvectors of the actions, sparsest basis inside each joint eigenspace"""
    spaces = [span]
    for perm in actions:
        refined = []
        for sub in spaces:
            restricted = hermitize(sub.conj().T @ sub[perm, :])
            vals, vecs = np.linalg.eigh(restricted)
            for sign in (1, -1):
                cols = vecs[:, np.sign(vals) == sign]
                if cols.shape[1]:
                    refined.append(sub @ cols)
        spaces = refined

    vectors: List[np.ndarray] = []
    for sub in spaces:
        candidates = _sparse_candidates(sub) or [_phase_normalize(c) for c in sub.T]
        picked = _greedy_orbits(candidates, [], sub.shape[1])
        vectors.extend(picked[0] if picked else [_phase_normalize(c) for c in sub.T])
    return vectors


def symmetry_orbits(
    basis: NullSpaceBasis,
    witnesses: Sequence[Union[SpinFlipWitness, ParityWitness]] = (),
    mode: OrbitMode = OrbitMode.AUTO,
) -> SymmetryOrbits:
    """Regroup the null basis into orbits of the induced spin-flip and reversal actions.

    The witness signs (eps^k, sigma^k) only relabel eigenvalues and do not
    change the grouping. Raises when the basis is not closed under an action.
    """
    k, d = basis.k, basis.dimension
    if d == 0:
        return SymmetryOrbits(k=k, vectors=basis.vectors, orbits=(), mode=mode)

    actions = []
    if any(isinstance(w, SpinFlipWitness) for w in witnesses):
        actions.append(flip_permutation(k))
    if any(isinstance(w, ParityWitness) for w in witnesses):
        actions.append(reversal_permutation(k))

    span = np.asarray(basis.vectors).T
    projector = span @ span.conj().T
    for perm in actions:
        image = span[perm, :]
        leak = np.linalg.norm(image - projector @ image)
        if leak > _CLOSURE_TOL * np.sqrt(d):
            raise WitnessInconsistencyError(f"null space at k={k} is not closed under the symmetry (leak {leak:.2e})")

    group = _group(actions)
    sparse = None
    if mode is not OrbitMode.ADAPTED:
        candidates = _sparse_candidates(span)
        if candidates is None:
            log.warning("k=%d: too many zero patterns for sparse orbits, using adapted basis", k)
        else:
            sparse = _greedy_orbits(candidates, group, d)

    adapted = None
    if mode is not OrbitMode.SPARSE or sparse is None:
        adapted = _adapted(span, actions)

    if mode is OrbitMode.AUTO and sparse is not None:
        sparse_min = min(len(_support(v)) for v in sparse[0])
        adapted_min = min(len(_support(v)) for v in adapted)
        use_sparse = sparse_min < adapted_min
    else:
        use_sparse = sparse is not None and mode is OrbitMode.SPARSE

    if use_sparse:
        vectors, orbits, resolved = sparse[0], sparse[1], OrbitMode.SPARSE
    else:
        vectors, orbits, resolved = adapted, [(i,) for i in range(len(adapted))], OrbitMode.ADAPTED
    log.debug("k=%d orbits %s (%s)", k, [len(o) for o in orbits], resolved.value)
    return SymmetryOrbits(k=k, vectors=frozen_array(np.array(vectors)), orbits=tuple(orbits), mode=resolved)


# Hamiltonians
def _lowdin(vectors: np.ndarray) -> np.ndarray:
    """Symmetric orthonormalization; commutes with unitaries that permute the set"""
    gram = vectors.conj() @ vectors.T
    vals, vecs = np.linalg.eigh(hermitize(gram))
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    return inv_sqrt.T @ vectors


def local_hamiltonian(
    source: Union[SymmetryOrbits, NullSpaceBasis],
    weights: Union[float, Sequence[float]] = 1.0,
) -> LocalHamiltonian:
    """h = sum over orbits of mu_o times the projector onto the orbit"""
    if isinstance(source, NullSpaceBasis):
        vectors = np.asarray(source.vectors)
        orbits = tuple((i,) for i in range(source.dimension))
    else:
        vectors = np.asarray(source.vectors)
        orbits = source.orbits
    if np.ndim(weights) == 0:
        weights = [float(weights)] * len(orbits)
    weights = [float(w) for w in weights]
    if len(weights) != len(orbits):
        raise ValidationError(f"weights: expected {len(orbits)} orbit weights, got {len(weights)}")
    if any(w <= 0 for w in weights):
        raise ValidationError("weights: orbit weights must be positive")

    dim = 2**source.k
    dense = np.zeros((dim, dim), dtype=complex)
    terms = []
    if len(vectors):
        ortho = _lowdin(vectors)
        for orbit, w in zip(orbits, weights):
            for i in orbit:
                dense += w * np.outer(ortho[i], ortho[i].conj())
                terms.append((frozen_array(ortho[i]), w))
    return LocalHamiltonian(k=source.k, projector_terms=tuple(terms), dense=frozen_array(hermitize(dense)))


def local_from_dense(h: np.ndarray) -> LocalHamiltonian:
    """Wrap an arbitrary Hermitian k-site operator (controls and identity shifts)"""
    h = np.asarray(h, dtype=complex)
    k = int(np.log2(h.shape[0]))
    if h.shape != (2**k, 2**k):
        raise ValidationError(f"h: expected a 2^k x 2^k matrix, got shape {h.shape}")
    return LocalHamiltonian(k=k, projector_terms=(), dense=frozen_array(hermitize(h)))


def assemble_chain(local: LocalHamiltonian, n: int) -> ChainHamiltonian:
    if n < local.k:
        raise ValidationError(f"n: chain of {n} sites is shorter than the interaction range {local.k}")
    if n > MAX_DENSE_SITES:
        raise ValidationError(f"n: chains beyond {MAX_DENSE_SITES} sites are not supported")
    return ChainHamiltonian(n=n, local=local)


def _shift_permutation(n: int, shift: int) -> np.ndarray:
    weights = 1 << (n - 1 - np.arange(n))
    bits = (np.arange(2**n)[:, None] >> (n - 1 - np.arange(n))) & 1
    return np.roll(bits, -shift, axis=1) @ weights


def chain_dense(chain: ChainHamiltonian) -> np.ndarray:
    """Dense H = sum_l h on sites l..l+k-1 (mod n)"""
    n, k = chain.n, chain.local.k
    if n > MAX_FULL_ED_SITES:
        raise ValidationError(f"n: dense chain Hamiltonians are limited to {MAX_FULL_ED_SITES} sites")
    h0 = np.kron(np.asarray(chain.local.dense), np.eye(2 ** (n - k)))
    total = np.zeros_like(h0)
    for shift in range(n):
        perm = _shift_permutation(n, shift)
        total += h0[np.ix_(perm, perm)]
    return hermitize(total)


def chain_matvec(chain: ChainHamiltonian, vec: np.ndarray) -> np.ndarray:
    """H @ vec without forming H"""
    n, k = chain.n, chain.local.k
    h = np.asarray(chain.local.dense)
    psi = np.asarray(vec, dtype=complex).reshape((2,) * n)
    out = np.zeros_like(psi)
    front = list(range(k))
    for shift in range(n):
        sites = [(shift + j) % n for j in range(k)]
        moved = np.moveaxis(psi, sites, front)
        applied = (h @ moved.reshape(2**k, -1)).reshape(moved.shape)
        out += np.moveaxis(applied, front, sites)
    return out.reshape(-1)


def chain_norm_bound(chain: ChainHamiltonian) -> float:
    return chain.n * float(np.linalg.norm(np.asarray(chain.local.dense), 2))


# Pauli expansions
def pauli_decomposition(local: Union[LocalHamiltonian, np.ndarray], tol: float = 1e-12) -> PauliDecomposition:
    """c_w = tr(h P_w) / 2^k over all 4^k words, site 1 first"""
    h = np.asarray(local.dense if isinstance(local, LocalHamiltonian) else local, dtype=complex)
    k = int(np.log2(h.shape[0]))
    raw: Dict[str, float] = {}
    words = [""]
    for _ in range(k):
        words = [w + p for w in words for p in "IXYZ"]
    for word in words:
        op = reduce(np.kron, [PAULI[p].op for p in word])
        raw[word] = float(np.sum(h * op.T).real) / 2**k
    cutoff = tol * max(max(abs(c) for c in raw.values()), 1.0)
    return PauliDecomposition(k=k, terms={w: c for w, c in raw.items() if abs(c) > cutoff})


def _trim(word: str) -> str:
    trimmed = word.strip("I")
    return trimmed if trimmed else "I"


def chain_density(decomposition: PauliDecomposition) -> Dict[str, float]:
    """Fold translated words onto one representative per chain term ("IZZ" -> "ZZ")"""
    density: Dict[str, float] = {}
    for word, coeff in decomposition.terms.items():
        key = _trim(word)
        density[key] = density.get(key, 0.0) + coeff
    return {w: c for w, c in density.items() if abs(c) > 1e-12}


def printed_h_a(theta: float, j: float = 1.0, k: float = 1.0) -> Dict[str, float]:
    u = (1 + np.cos(theta)) / 2
    return {
        "ZZ": j * (u**2 - 1) / 2,
        "ZIZ": j * (u**2 + 1) / 2 - k / 2,
        "XIX": -u * j,
        "YIY": u * j,
        "X": -k / 2,
        "ZXZ": k / 2,
    }


def printed_h_b(g: float) -> Dict[str, float]:
    return {"XX": 1 - g**2, "YY": -(1 - g**2), "ZZ": (1 + 2 * g**2) / 2, "X": 1.0}


def printed_cirac(q: float) -> Dict[str, float]:
    return {"ZZ": 2 * (q**2 - 1), "X": -((1 + q) ** 2), "ZXZ": (q - 1) ** 2}


def compare_pauli(decomposition: PauliDecomposition, printed: Dict[str, float], target: str) -> PauliComparison:
    """Affine fit density ~ a * printed + shift * I; the identity word is the shift"""
    density = chain_density(decomposition)
    shift = density.pop("I", 0.0)
    words = sorted(set(density) | (set(printed) - {"I"}))
    d = np.array([density.get(w, 0.0) for w in words])
    t = np.array([printed.get(w, 0.0) for w in words])
    tt = float(t @ t)
    scale = float(d @ t) / tt if tt > 0 else 0.0
    norm = float(np.linalg.norm(d))
    if norm > 0:
        residual = float(np.linalg.norm(d - scale * t) / norm)
    else:
        residual = 0.0 if tt == 0 else 1.0
    flagged = residual > _COMPARISON_FLAG
    if flagged:
        log.warning("%s: constructed Hamiltonian differs from the printed form (residual %.3e)", target, residual)
    return PauliComparison(
        target=target,
        scale=scale,
        shift=shift,
        residual=residual,
        flagged=flagged,
        constructed=density,
        printed=dict(printed),
    )


def _hermitian_basis(d: int) -> List[np.ndarray]:
    basis = []
    for a in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[a, a] = 1
        basis.append(m)
    for a, b in combinations(range(d), 2):
        sym = np.zeros((d, d), dtype=complex)
        sym[a, b] = sym[b, a] = 1
        anti = np.zeros((d, d), dtype=complex)
        anti[a, b], anti[b, a] = 1j, -1j
        basis.extend([sym, anti])
    return basis


def fit_parent_family(
    source: Union[SymmetryOrbits, NullSpaceBasis], printed: Dict[str, float], target: str
) -> FamilyFit:
    """Least-squares Hermitian M with chain density of sum M_ab |e_a><e_b| = printed + shift.

    A semidefinite M means the printed chain form is, up to sign and an
    identity shift, a frustration-free parent Hamiltonian of the MPS.
    """
    vectors = _lowdin(np.asarray(source.vectors))
    d = len(vectors)
    herm = _hermitian_basis(d)
    words = set(printed) - {"I"}
    columns = []
    for m in herm:
        op = vectors.T @ m @ vectors.conj()
        columns.append(chain_density(pauli_decomposition(op)))
        words |= set(columns[-1]) - {"I"}
    words = sorted(words)
    design = np.array([[col.get(w, 0.0) for col in columns] for w in words])
    rhs = np.array([printed.get(w, 0.0) for w in words])
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    residual = float(np.linalg.norm(design @ coeffs - rhs) / max(np.linalg.norm(rhs), 1e-300))

    matrix = sum(c * m for c, m in zip(coeffs, herm))
    shift = sum(c * col.get("I", 0.0) for c, col in zip(coeffs, columns))
    eigenvalues = np.linalg.eigvalsh(hermitize(matrix))
    top = max(float(np.max(np.abs(eigenvalues))), 1e-300)
    definite = bool(np.all(eigenvalues >= -1e-8 * top) or np.all(eigenvalues <= 1e-8 * top))
    return FamilyFit(
        target=target,
        residual=residual,
        shift=float(shift),
        matrix=frozen_array(matrix),
        eigenvalues=frozen_array(eigenvalues, dtype=float),
        definite=definite,
    )
