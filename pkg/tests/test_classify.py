import numpy as np
import pytest
from numpy.testing import assert_allclose

from classify import build_cirac, build_model, canonicalize, equivalence_witness
from errors import ValidationError
from models import MatrixPair, ModelTag
from mps_core import gauge_transform

_U = np.array([[1.0, 0.3 + 0.2j], [-0.4, 1.2]])
# integer gauge with unit determinant keeps Jordan blocks exact
_U_INT = np.array([[2.0, 1.0], [1.0, 1.0]])


def _reconstructs(pair, form):
    source = (pair.a1, pair.a0) if form.swapped else (pair.a0, pair.a1)
    target = build_model(form.tag, **form.params)
    u_inv = np.linalg.inv(form.gauge_u)
    for a, t in zip(source, target.matrices):
        assert_allclose(form.gauge_mu * form.gauge_u @ a @ u_inv, t, atol=1e-8)


def test_build_model_matrices():
    g, theta = 0.5, np.pi / 3
    pair = build_model(ModelTag.A, g=g, theta=theta)
    assert_allclose(pair.a0, np.diag([1 + g, 1 - g]))
    assert_allclose(pair.a1[0, 1], g * np.sin(theta))

    pair = build_model(ModelTag.B, g=g, c=2.0, epsilon=-1)
    assert_allclose(pair.a1, [[-1 + g, 0], [2.0, -1 - g]])


def test_build_model_validation():
    with pytest.raises(ValidationError, match="theta"):
        build_model(ModelTag.A, g=0.5)
    with pytest.raises(ValidationError, match="epsilon"):
        build_model(ModelTag.B, g=0.5, c=1.0, epsilon=2)
    with pytest.raises(ValidationError, match="tag"):
        build_model(ModelTag.DEGENERATE, g=0.5)


@pytest.mark.parametrize("theta", [np.pi / 3, 2.0, -1.2])
def test_model_a_recovered_through_gauge(theta):
    original = build_model(ModelTag.A, g=0.5, theta=theta)
    pair = gauge_transform(original, _U, 0.7 - 0.3j)
    form = canonicalize(pair)
    assert form.tag is ModelTag.A
    assert_allclose(form.params["g"], 0.5, atol=1e-8)
    assert_allclose(abs(form.params["theta"]), abs(theta), atol=1e-8)
    assert form.params["epsilon"] == 1
    _reconstructs(pair, form)


def test_model_b_normalizes_c():
    pair = gauge_transform(build_model(ModelTag.B, g=0.5, c=2.0), _U, 1.3)
    form = canonicalize(pair)
    assert form.tag is ModelTag.B
    assert_allclose(form.params["g"], 0.5, atol=1e-8)
    assert form.params["c"] == 1.0
    _reconstructs(pair, form)


def test_model_b_without_coupling():
    form = canonicalize(build_model(ModelTag.B, g=0.4, c=0.0))
    assert form.tag is ModelTag.B
    assert form.params["c"] == 0.0
    assert "both diagonal" in form.notes


def test_anti_aligned_diagonal_pair_is_model_a_at_pi():
    form = canonicalize(build_model(ModelTag.A, g=0.4, theta=np.pi))
    assert form.tag is ModelTag.A
    assert_allclose(form.params["theta"], np.pi)
    assert_allclose(form.params["g"], 0.4, atol=1e-10)


@pytest.mark.parametrize("u, g", [(1.0, 1.0), (-0.5, 1.5), (2.0, 0.25)])
def test_model_c_jordan_branch(u, g):
    pair = gauge_transform(build_model(ModelTag.C, u=u, g=g), _U_INT, 2.0)
    form = canonicalize(pair)
    assert form.tag is ModelTag.C
    assert form.params["g"] >= 0
    assert_allclose(form.params["u"] * form.params["g"], u * g, atol=1e-8)
    _reconstructs(pair, form)


@pytest.mark.parametrize("q", [0.25, 0.5, 0.75])
def test_cirac_is_model_a_at_unit_g(q):
    form = canonicalize(build_cirac(q))
    assert form.tag is ModelTag.A
    assert_allclose(form.params["g"], 1.0, atol=1e-8)
    assert_allclose(abs(form.params["theta"]), np.arccos(2 * q - 1), atol=1e-8)
    assert_allclose(form.gauge_mu, 2.0, atol=1e-10)


def test_cirac_outside_unit_interval_is_degenerate():
    form = canonicalize(build_cirac(2.0))
    assert form.tag is ModelTag.DEGENERATE
    assert "complex canonical parameters" in form.notes


def test_degenerate_cases(random_pair):
    assert canonicalize(random_pair()).tag is ModelTag.DEGENERATE

    form = canonicalize(MatrixPair(np.eye(2), np.eye(2)))
    assert form.tag is ModelTag.DEGENERATE
    assert form.notes == ("proportional matrices: product state",)


def test_equivalence_of_gauge_related_pairs(random_pair):
    pair, mu = random_pair(), 1.7 + 0.4j
    other = gauge_transform(pair, _U, mu)
    s, scale = equivalence_witness(pair, other)
    assert_allclose(scale, 1 / mu, rtol=1e-9)
    s_inv = np.linalg.inv(s)
    for a, b in zip(pair.matrices, other.matrices):
        assert_allclose(s @ a @ s_inv, scale * b, atol=1e-9)


@pytest.mark.parametrize("theta", [np.pi / 4, np.pi / 2, 3 * np.pi / 4])
def test_model_a_at_unit_g_is_equivalent_to_cirac(theta):
    pair = build_model(ModelTag.A, g=1.0, theta=theta)
    cirac = build_cirac((1 + np.cos(theta)) / 2)
    s, mu = equivalence_witness(pair, cirac)
    assert_allclose(mu, 2.0, atol=1e-10)
    s_inv = np.linalg.inv(s)
    for a, b in zip(pair.matrices, cirac.matrices):
        assert_allclose(s @ a @ s_inv, mu * b, atol=1e-9)


def test_inequivalent_models():
    a = build_model(ModelTag.A, g=0.5, theta=np.pi / 3)
    b = build_model(ModelTag.B, g=0.5, c=1.0)
    assert equivalence_witness(a, b) is None


def test_canonical_form_is_gauge_invariant(rng):
    original = build_model(ModelTag.A, g=0.5, theta=1.0)
    for _ in range(50):
        u = np.eye(2) + 0.5 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        while np.linalg.cond(u) > 20:
            u = np.eye(2) + 0.5 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        mu = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
        form = canonicalize(gauge_transform(original, u, mu))
        assert form.tag is ModelTag.A
        assert_allclose(form.params["g"], 0.5, atol=1e-7)
        assert_allclose(abs(form.params["theta"]), 1.0, atol=1e-7)
