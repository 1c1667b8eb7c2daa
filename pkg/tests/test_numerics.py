import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import ValidationError
from numerics import as_square, eig, hermitize, kron, left_null_space, power_scaled, sort_order


def test_sort_order_modulus_then_real_then_imag():
    values = np.array([1.0, -2.0, 2j, 0.5])
    assert_allclose(values[sort_order(values)], [2j, -2.0, 1.0, 0.5])


def test_sort_order_empty():
    assert sort_order(np.array([])).size == 0


def test_kron_block_layout():
    a = np.array([[1, 2], [3, 4]])
    b = np.eye(2)
    out = kron(a, b)
    assert_allclose(out[2:, :2], 3 * b)
    assert out.dtype == complex


def test_eig_biorthonormal(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    dec = eig(m)
    assert not dec.is_defective
    r, l = dec.right_vectors, dec.left_vectors
    assert_allclose(m @ r, r * dec.eigenvalues, atol=1e-10)
    assert_allclose(l.conj().T @ r, np.eye(4), atol=1e-10)
    mods = np.abs(dec.eigenvalues)
    assert np.all(np.diff(mods) <= 1e-12)


def test_eig_flags_jordan_block():
    assert eig([[1.0, 1.0], [0.0, 1.0]]).is_defective


def test_eig_rejects_non_square():
    with pytest.raises(ValidationError, match="square"):
        eig(np.zeros((2, 3)))


def test_left_null_space_rank_one():
    rows = left_null_space([[1.0, 2.0], [2.0, 4.0]])
    assert rows.shape == (1, 2)
    assert_allclose(rows @ np.array([[1.0, 2.0], [2.0, 4.0]]), 0, atol=1e-12)
    assert_allclose(np.linalg.norm(rows[0]), 1.0)


def test_left_null_space_of_zero_matrix_is_everything():
    assert_allclose(left_null_space(np.zeros((3, 2))), np.eye(3))


@pytest.mark.parametrize("tol", [0.0, 1.0, -1e-3])
def test_left_null_space_tolerance_range(tol):
    with pytest.raises(ValidationError, match="tol"):
        left_null_space(np.eye(2), tol)


def test_power_scaled_matches_matrix_power(rng):
    m = rng.normal(size=(3, 3))
    p, s = power_scaled(m, 7)
    assert_allclose(np.exp(s) * p, np.linalg.matrix_power(m, 7), rtol=1e-10, atol=1e-10)
    assert_allclose(np.linalg.norm(p, np.inf), 1.0)


def test_power_scaled_large_exponent_stays_finite():
    p, s = power_scaled(np.diag([2.0, 1.0]), 5000)
    assert_allclose(s, 5000 * np.log(2), rtol=1e-12)
    assert_allclose(p, np.diag([1.0, 0.0]), atol=1e-12)


def test_power_scaled_nilpotent_and_zero_exponent():
    p, s = power_scaled([[0.0, 1.0], [0.0, 0.0]], 2)
    assert s == -np.inf
    assert not np.any(p)
    p, s = power_scaled([[3.0, 1.0], [0.0, 2.0]], 0)
    assert_allclose(p, np.eye(2))
    assert s == 0.0


def test_power_scaled_rejects_negative_exponent():
    with pytest.raises(ValidationError, match="non-negative"):
        power_scaled(np.eye(2), -1)


def test_as_square_rejects_nan():
    with pytest.raises(ValidationError, match="finite"):
        as_square([[np.nan, 0], [0, 1]])


def test_hermitize():
    m = np.array([[1, 2j], [0, 3]])
    h = hermitize(m)
    assert_allclose(h, h.conj().T)
