"""
Canonical families of symmetric 2x2 MPS and the gauge reduction onto them.

Model A: A0 = diag(1+g, 1-g), A1 = [[eps + g cos t, g sin t], [g sin t, eps - g cos t]]
Model B: B0 = diag(1+g, 1-g), B1 = [[eps + g, 0], [c, eps - g]]
Model C: C0 = [[1, 0], [g, 1]], C1 = [[eps + u, u], [-u, eps - u]]

canonicalize returns the family, its parameters and (U, mu) with
canonical_i = mu U A_s(i) U^-1, where s swaps the pair when `swapped` is set.
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import DIAG_TOL, NULL_TOL, WITNESS_TOL, ZERO_TOL
from errors import ValidationError
from models import CanonicalForm, MatrixPair, ModelTag
from numerics import kron, left_null_space
from symmetry import invariant_check, select_invertible

log = logging.getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
# reconstruction residual above which a reduction is rejected
_RECON_TOL = 1e-7
_JORDAN_NOISE = 1e-6

PARAM_NAMES = {
    ModelTag.A: ("g", "theta", "epsilon"),
    ModelTag.B: ("g", "c", "epsilon"),
    ModelTag.C: ("g", "u", "epsilon"),
}


def _real_param(params: Dict[str, float], name: str) -> float:
    if name not in params:
        raise ValidationError(f"{name}: missing model parameter")
    value = params[name]
    if isinstance(value, complex) or not np.isfinite(float(value)):
        raise ValidationError(f"{name}: parameter must be real and finite")
    return float(value)


def build_model(tag: ModelTag, **params) -> MatrixPair:
    """Exact canonical matrices of a family; epsilon defaults to +1"""
    if tag not in PARAM_NAMES:
        raise ValidationError(f"tag: cannot build matrices for {tag.value}")
    params.setdefault("epsilon", 1)
    eps = params["epsilon"]
    if eps not in (1, -1):
        raise ValidationError(f"epsilon: must be +1 or -1, got {eps}")
    g = _real_param(params, "g")

    if tag is ModelTag.A:
        theta = _real_param(params, "theta")
        a0 = np.diag([1 + g, 1 - g])
        a1 = np.array([
            [eps + g * np.cos(theta), g * np.sin(theta)],
            [g * np.sin(theta), eps - g * np.cos(theta)],
        ])
    elif tag is ModelTag.B:
        c = _real_param(params, "c")
        a0 = np.diag([1 + g, 1 - g])
        a1 = np.array([[eps + g, 0.0], [c, eps - g]])
    else:
        u = _real_param(params, "u")
        a0 = np.array([[1.0, 0.0], [g, 1.0]])
        a1 = np.array([[eps + u, u], [-u, eps - u]])
    return MatrixPair(a0, a1)


def build_cirac(q: float) -> MatrixPair:
    return MatrixPair([[0, 0], [1, 1]], [[1, q], [0, 0]])


def _degenerate(note: str) -> CanonicalForm:
    log.debug("degenerate classification: %s", note)
    return CanonicalForm(tag=ModelTag.DEGENERATE, notes=(note,))


def _is_real(z: complex, scale: float, tol: float) -> bool:
    return abs(np.imag(z)) <= tol * max(scale, 1.0)


def _finish(pair, tag, params, u, mu, swapped, notes) -> CanonicalForm:
    source = (pair.a1, pair.a0) if swapped else (pair.a0, pair.a1)
    target = build_model(tag, **params)
    u_inv = np.linalg.inv(u)
    residual = max(
        np.linalg.norm(mu * u @ a @ u_inv - t) / max(1.0, np.linalg.norm(t))
        for a, t in zip(source, target.matrices)
    )
    if residual > _RECON_TOL:
        return _degenerate(f"gauge reconstruction failed (residual {residual:.2e})")
    return CanonicalForm(
        tag=tag,
        params=params,
        gauge_u=u,
        gauge_mu=complex(mu),
        swapped=swapped,
        notes=tuple(notes),
        residual=float(residual),
    )


def _relative_gap(m: np.ndarray) -> float:
    """|lambda_1 - lambda_2| / max|lambda| from the discriminant (a - d)^2 + 4bc"""
    disc = (m[0, 0] - m[1, 1]) ** 2 + 4 * m[0, 1] * m[1, 0]
    gap = np.sqrt(abs(disc))
    top = max(abs(np.trace(m) / 2) + gap / 2, ZERO_TOL)
    return float(gap / top)


def _diagonal_branch(pair, pivot, other, swapped, eps, tol) -> CanonicalForm:
    lam, vecs = np.linalg.eig(pivot)
    if abs(lam[0] + lam[1]) <= tol * np.max(np.abs(lam)):
        return _degenerate("traceless pivot matrix: no canonical scale")
    mu = 2 / (lam[0] + lam[1])
    g = (lam[0] - lam[1]) / (lam[0] + lam[1])
    if not _is_real(g, 1.0, tol):
        return _degenerate("complex canonical parameters")
    if g.real < 0:
        lam, vecs, g = lam[::-1], vecs[:, ::-1], -g
    g = float(g.real)
    u = np.linalg.inv(vecs)
    a1 = mu * u @ other @ vecs
    off_tol = tol * max(1.0, np.linalg.norm(a1))
    a, b, c, d = a1[0, 0], a1[0, 1], a1[1, 0], a1[1, 1]

    if abs(b) > off_tol and abs(c) > off_tol:
        sb, sc = np.sqrt(b), np.sqrt(c)
        s = sb * sc
        if not (_is_real(a, 1.0, tol) and _is_real(s, 1.0, tol)):
            return _degenerate("complex canonical parameters")
        theta = float(np.arctan2(s.real, a.real - eps))
        if theta <= -np.pi:
            theta = np.pi
        u = np.diag([sc, sb]) @ u
        return _finish(pair, ModelTag.A, {"g": g, "theta": theta, "epsilon": eps}, u, mu, swapped, [])

    if abs(b) > off_tol or abs(c) > off_tol:
        if abs(b) > off_tol:
            # upper triangular: swap the basis, which flips the sign of g
            u, g, a, c = _SWAP @ u, -g, d, b
        if abs(a - (eps + g)) > tol * max(1.0, abs(a)):
            return _degenerate("triangular pair without spin-flip symmetry")
        u = np.diag([1.0, 1.0 / c]) @ u
        notes = ["c != 0 (fixed to 1 by the residual diagonal gauge; only c = 0 vs c != 0 is invariant)"]
        return _finish(pair, ModelTag.B, {"g": g, "c": 1.0, "epsilon": eps}, u, mu, swapped, notes)

    if abs(a - (eps + g)) <= tol * max(1.0, abs(a)):
        return _finish(pair, ModelTag.B, {"g": g, "c": 0.0, "epsilon": eps}, u, mu, swapped, ["both diagonal", "c = 0"])
    # anti-aligned diagonal pair: the product-state point of Model A
    return _finish(
        pair, ModelTag.A, {"g": g, "theta": float(np.pi), "epsilon": eps}, u, mu, swapped,
        ["both diagonal", "sum of two product states"],
    )


def _rank_one(n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """n = r k^T for a rank-one matrix"""
    uu, s, vh = np.linalg.svd(n)
    return uu[:, 0] * s[0], vh[0, :]


def _complement(r: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(r[1]), np.conj(r[0])])


def _jordan_branch(pair, eps, tol) -> CanonicalForm:
    lam0 = np.trace(pair.a0) / 2
    lam1 = np.trace(pair.a1) / 2
    if abs(lam0) <= ZERO_TOL * pair.scale:
        return _degenerate("nilpotent matrices: no canonical scale")
    mu = 1 / lam0
    n0 = pair.a0 - lam0 * _I2
    n1 = pair.a1 - lam1 * _I2
    zero_tol = tol * pair.scale
    has0, has1 = np.linalg.norm(n0) > zero_tol, np.linalg.norm(n1) > zero_tol

    if not has0 and not has1:
        return _degenerate("proportional matrices: product state")

    if has0 and has1:
        r0, k0 = _rank_one(n0)
        r1, k1 = _rank_one(n1)
        basis = np.column_stack([r0, r1])
        if abs(np.linalg.det(basis)) <= tol * np.linalg.norm(r0) * np.linalg.norm(r1):
            return _degenerate("commuting Jordan blocks with a shared range")
        x0, x1 = k0 @ r1, k1 @ r0
        product = mu**2 * x0 * x1
        if not _is_real(product, abs(product), tol):
            return _degenerate("complex canonical parameters")
        product = float(product.real)
        g = np.sqrt(abs(product))
        t = g / (mu * x0)
        u = np.array([[0, 1], [t, -1]]) @ np.linalg.inv(basis)
        params = {"g": float(g), "u": product / g, "epsilon": eps}
        notes = ["g*u is gauge invariant; g >= 0 by convention"]
    elif has1:
        r1, k1 = _rank_one(n1)
        w = _complement(r1)
        gamma = mu * (k1 @ w) / 2
        u = np.array([[1, gamma], [-1, gamma]]) @ np.linalg.inv(np.column_stack([r1, w]))
        params = {"g": 0.0, "u": 1.0, "epsilon": eps}
        notes = ["A0 proportional to identity: crossover line g = 0"]
    else:
        r0, k0 = _rank_one(n0)
        w = _complement(r0)
        beta = mu * (k0 @ w)
        u = np.array([[0, beta], [1, 0]]) @ np.linalg.inv(np.column_stack([r0, w]))
        params = {"g": 1.0, "u": 0.0, "epsilon": eps}
        notes = ["A1 proportional to identity: crossover line u = 0"]
    return _finish(pair, ModelTag.C, params, u, mu, False, notes)


def canonicalize(pair: MatrixPair, tol: float = DIAG_TOL) -> CanonicalForm:
    report = invariant_check(pair)
    if report.trace_sign is None or not report.det_ok:
        return _degenerate("invariants violated: no symmetric MPS class")
    eps = report.trace_sign

    # A1 may take the pivot role; the sign relation is symmetric in the pair
    for pivot, other, swapped in ((pair.a0, pair.a1, False), (pair.a1, pair.a0, True)):
        gap = _relative_gap(pivot)
        if gap <= tol:
            continue
        form = _diagonal_branch(pair, pivot, other, swapped, eps, tol)
        # rounding splits a Jordan block by ~sqrt(machine eps); let those reach the Jordan branch
        if form.tag is not ModelTag.DEGENERATE or gap > _JORDAN_NOISE:
            return form
    return _jordan_branch(pair, eps, tol)


def _scale_candidates(pair1: MatrixPair, pair2: MatrixPair) -> List[complex]:
    found: List[complex] = []

    def add(value):
        if np.isfinite(value) and abs(value) > ZERO_TOL and all(abs(value - f) > 1e-9 * abs(f) for f in found):
            found.append(complex(value))

    for a, b in zip(pair1.matrices, pair2.matrices):
        if abs(np.trace(b)) > ZERO_TOL * pair2.scale:
            add(np.trace(a) / np.trace(b))
    if not found:
        for a, b in zip(pair1.matrices, pair2.matrices):
            db = np.linalg.det(b)
            if abs(db) > ZERO_TOL * pair2.scale**2:
                root = np.sqrt(np.linalg.det(a) / db)
                add(root)
                add(-root)
    if not found:
        ratio = pair1.scale / pair2.scale
        add(ratio)
        add(-ratio)
    return found


def equivalence_witness(
    pair1: MatrixPair, pair2: MatrixPair, tol: float = NULL_TOL
) -> Optional[Tuple[np.ndarray, complex]]:
    """Invertible S and scalar mu with S A_i S^-1 = mu A'_i for both i"""
    for mu in _scale_candidates(pair1, pair2):
        system = np.vstack([
            kron(_I2, a.T) - mu * kron(b, _I2) for a, b in zip(pair1.matrices, pair2.matrices)
        ])
        null_rows = left_null_space(system.T, tol)
        if len(null_rows) == 0:
            continue
        s = select_invertible(null_rows)
        if s is None:
            continue
        s_inv = np.linalg.inv(s)
        residual = max(
            np.linalg.norm(s @ a @ s_inv - mu * b) / max(1.0, np.linalg.norm(mu * b))
            for a, b in zip(pair1.matrices, pair2.matrices)
        )
        log.debug("equivalence candidate mu=%s residual=%.3e", mu, residual)
        if residual <= WITNESS_TOL:
            return s, mu
    return None
