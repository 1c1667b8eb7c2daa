import numpy as np
import pytest

from classify import build_cirac, build_model
from errors import SingularMatrixError
from models import MatrixPair, ModelTag, SpinFlipWitness
from symmetry import (
    find_parity_witness,
    find_spin_flip_witness,
    invariant_check,
    parity_witnesses,
    select_invertible,
    spin_flip_witnesses,
    verify_witness,
)


def _proportional(x, expected) -> bool:
    x, expected = np.asarray(x), np.asarray(expected, dtype=complex)
    overlap = abs(np.vdot(expected, x)) / (np.linalg.norm(x) * np.linalg.norm(expected))
    return overlap > 1 - 1e-9


@pytest.mark.parametrize("theta", [np.pi / 3, 1.0, 2.5])
def test_model_a_spin_flip_witness(theta):
    pair = build_model(ModelTag.A, g=0.5, theta=theta)
    witness = find_spin_flip_witness(pair)
    assert witness.epsilon == 1
    expected = [[np.cos(theta / 2), np.sin(theta / 2)], [np.sin(theta / 2), -np.cos(theta / 2)]]
    assert _proportional(witness.x, expected)
    assert verify_witness(pair, witness) < 1e-9
    assert np.isclose(np.linalg.norm(witness.x), 1.0)


def test_model_a_parity_is_identity(model_a):
    found = parity_witnesses(model_a)
    assert [w.sigma for w in found] == [1]
    assert _proportional(found[0].omega, np.eye(2))


def test_model_b_has_spin_flip_but_no_parity():
    g, c = 0.5, 1.0
    pair = build_model(ModelTag.B, g=g, c=c)
    witness = find_spin_flip_witness(pair)
    assert witness.epsilon == 1
    assert _proportional(witness.x, [[2 * g, 0], [c, -2 * g]])
    assert find_parity_witness(pair) is None


@pytest.mark.parametrize("u, g", [(1.0, 1.0), (0.5, 2.0), (-0.7, 1.3)])
def test_model_c_witnesses(u, g):
    pair = build_model(ModelTag.C, u=u, g=g)
    flip = find_spin_flip_witness(pair)
    assert flip.epsilon == 1
    assert _proportional(flip.x, [[u, u], [g - u, -u]])
    parity = find_parity_witness(pair)
    assert parity.sigma == 1
    assert _proportional(parity.omega, [[2, 1], [1, 0]])


@pytest.mark.parametrize("q", [0.25, 0.5, 2.0])
def test_cirac_spin_flip_witness(q):
    witness = find_spin_flip_witness(build_cirac(q))
    assert witness.epsilon == 1
    assert _proportional(witness.x, [[0, q], [1, 0]])


def test_invariants():
    report = invariant_check(build_cirac(0.5))
    assert report.trace_sign == 1
    assert report.det_ok

    report = invariant_check(build_model(ModelTag.A, g=0.3, theta=1.0, epsilon=-1))
    assert report.trace_sign == -1

    report = invariant_check(MatrixPair([[1, 0], [0, 2]], [[3, 0], [0, 1]]))
    assert report.trace_sign is None
    assert not report.det_ok


def test_random_pair_has_parity_but_no_spin_flip_witness(random_pair):
    pair = random_pair()
    assert spin_flip_witnesses(pair) == []
    witness = find_parity_witness(pair)
    assert witness is not None
    assert verify_witness(pair, witness) < 1e-9
    assert len(parity_witnesses(pair)) >= 1


def test_select_invertible_prefers_combination():
    # each basis vector alone is singular, their sum is the identity
    rows = np.array([[1, 0, 0, 0], [0, 0, 0, 1]], dtype=complex)
    best = select_invertible(rows)
    assert _proportional(best, np.eye(2))


def test_select_invertible_all_singular():
    assert select_invertible(np.array([[1, 0, 0, 0]], dtype=complex)) is None


def test_verify_witness_rejects_singular(model_a):
    with pytest.raises(SingularMatrixError):
        verify_witness(model_a, SpinFlipWitness(x=np.array([[1, 0], [0, 0]]), epsilon=1))
