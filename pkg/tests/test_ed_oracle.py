import numpy as np
import pytest
from numpy.testing import assert_allclose

from classify import build_cirac, build_model
from ed_oracle import (
    branch_states,
    degeneracy_count,
    export_state,
    ground_check,
    load_state,
    mps_to_dense,
    product_state,
    state_rank,
    state_symmetry_check,
)
from errors import NullStateError, ValidationError
from models import DenseState, MatrixPair, ModelTag
from mps_core import amplitude
from parent_ham import (
    assemble_chain,
    interaction_range,
    local_from_dense,
    local_hamiltonian,
    null_space_basis,
    printed_cirac,
    symmetry_orbits,
)
from symmetry import find_parity_witness, parity_witnesses, spin_flip_witnesses, verify_witness


def _parent_chain(pair, n):
    k = interaction_range(pair)
    basis = null_space_basis(pair, k)
    orbits = symmetry_orbits(basis, spin_flip_witnesses(pair) + parity_witnesses(pair))
    return assemble_chain(local_hamiltonian(orbits), n)


def test_dense_amplitudes_follow_site_order(random_pair):
    pair = random_pair()
    state = mps_to_dense(pair, 4)
    assert state.amplitudes.shape == (16,)
    for config in ("0110", "1000", "0001"):
        assert_allclose(state.amplitudes[int(config, 2)], amplitude(pair, config), rtol=1e-12)


def test_dense_state_limits(model_a):
    with pytest.raises(ValidationError, match="n"):
        mps_to_dense(model_a, 15)
    with pytest.raises(NullStateError):
        mps_to_dense(MatrixPair([[0, 1], [0, 0]], np.zeros((2, 2))), 4)


def test_model_b_state_is_uniform_for_every_c():
    g, n = 0.5, 6
    states = [mps_to_dense(build_model(ModelTag.B, g=g, c=c), n) for c in (0.3, 1.0, 2.0)]
    assert_allclose(states[0].amplitudes, (1 + g) ** n + (1 - g) ** n)
    assert state_rank(states) == 1
    symmetry = state_symmetry_check(states[1])
    assert symmetry.spin_flip_residual < 1e-12
    assert symmetry.reversal_residual < 1e-12


def test_symmetric_model_a_state(model_a):
    symmetry = state_symmetry_check(mps_to_dense(model_a, 7))
    assert symmetry.spin_flip_residual < 1e-10
    assert symmetry.reversal_residual < 1e-10


def test_branch_states_sum_to_mps():
    g, n = 0.4, 5
    pair = build_model(ModelTag.A, g=g, theta=np.pi)
    branches = branch_states(pair, n)
    assert len(branches) == 2
    assert_allclose(branches[0].amplitudes, product_state([1 + g, 1 - g], n).amplitudes, atol=1e-12)
    total = sum(np.asarray(b.amplitudes) for b in branches)
    assert_allclose(total, mps_to_dense(pair, n).amplitudes, atol=1e-12)
    assert state_rank(branches) == 2


def test_branch_states_of_non_diagonal_pair(model_a):
    assert branch_states(model_a, 4) == []


@pytest.mark.parametrize("n", [6, 8])
def test_parent_hamiltonian_ground_state_model_c(model_c, n):
    chain = _parent_chain(model_c, n)
    report = ground_check(chain, [mps_to_dense(model_c, n)])
    assert report.full_diagonalization
    assert abs(report.lambda_min) < 1e-10 * report.norm_bound
    assert report.rayleigh[0] < 1e-10 * report.norm_bound
    assert report.overlaps[0] > 1 - 1e-8
    assert report.ground_dimension >= 1
    assert np.all(np.diff(report.lowest) >= -1e-12)


def test_parent_hamiltonian_ground_state_model_a():
    pair = build_model(ModelTag.A, g=1.0, theta=np.pi / 3)
    report = ground_check(_parent_chain(pair, 6), [mps_to_dense(pair, 6)])
    assert report.lambda_min > -1e-10 * report.norm_bound
    assert report.rayleigh[0] < 1e-10 * report.norm_bound


def test_rayleigh_only_mode(model_b):
    chain = _parent_chain(model_b, 13)
    report = ground_check(chain, [mps_to_dense(model_b, 13)])
    assert not report.full_diagonalization
    assert report.lambda_min is None
    assert report.ground_dimension is None
    assert report.overlaps == (None,)
    assert report.lowest.size == 0
    assert abs(report.rayleigh[0]) < 1e-10 * report.norm_bound


def test_ground_check_rejects_mismatched_state(model_b):
    chain = _parent_chain(model_b, 6)
    with pytest.raises(ValidationError, match="sites"):
        ground_check(chain, [mps_to_dense(model_b, 5)])


def test_degeneracy_count(model_b):
    chain = _parent_chain(model_b, 6)
    assert degeneracy_count(chain) >= 1
    assert degeneracy_count(chain, 4) >= 1


def test_export_layout(tmp_path, random_pair):
    state = mps_to_dense(random_pair(), 5)
    path = export_state(state, tmp_path / "psi.bin")
    assert path.stat().st_size == 16 * 2**5
    raw = np.fromfile(path, dtype="<f8")
    assert_allclose(raw[0::2] + 1j * raw[1::2], state.amplitudes)
    loaded = load_state(path)
    assert loaded.n == 5


def test_load_state_rejects_odd_sizes(tmp_path):
    path = tmp_path / "bad.bin"
    np.zeros(3, dtype="<c16").tofile(path)
    with pytest.raises(ValidationError, match="power of two"):
        load_state(path)


_ZERO_ENERGY_GRID = [
    (ModelTag.A, {"g": 0.5, "theta": np.pi / 4}),
    (ModelTag.A, {"g": 0.5, "theta": 3 * np.pi / 4}),
    (ModelTag.A, {"g": 1.0, "theta": np.pi / 2}),
    (ModelTag.A, {"g": 0.25, "theta": np.pi - 0.1}),
    (ModelTag.B, {"g": 0.3, "c": 0.5}),
    (ModelTag.B, {"g": 0.5, "c": 2.0}),
    (ModelTag.B, {"g": -0.7, "c": 1.0}),
    (ModelTag.C, {"u": 1.0, "g": 1.0}),
    (ModelTag.C, {"u": 0.5, "g": 1.5}),
    (ModelTag.C, {"u": -1.0, "g": 0.5}),
]


@pytest.mark.parametrize("tag, params", _ZERO_ENERGY_GRID)
def test_mps_is_a_zero_energy_ground_state(tag, params):
    pair = build_model(tag, **params)
    k = interaction_range(pair)
    for n in range(k + 1, 9):
        report = ground_check(_parent_chain(pair, n), [mps_to_dense(pair, n)])
        assert report.rayleigh[0] < 1e-10 * report.norm_bound
        assert report.lambda_min > -1e-10 * report.norm_bound


@pytest.mark.parametrize("n", [6, 8])
def test_model_b_states_share_one_parent_hamiltonian(n):
    g = 0.5
    chain = _parent_chain(build_model(ModelTag.B, g=g, c=1.0), n)
    states = [mps_to_dense(build_model(ModelTag.B, g=g, c=c), n) for c in (0.0, 1.0, 2.0, 5.0)]
    report = ground_check(chain, states)
    for energy in report.rayleigh:
        assert abs(energy) < 1e-10 * report.norm_bound
    assert report.ground_dimension >= state_rank(states)


def test_model_b_local_term_does_not_depend_on_c():
    def local(c):
        pair = build_model(ModelTag.B, g=0.5, c=c)
        orbits = symmetry_orbits(null_space_basis(pair, 2), spin_flip_witnesses(pair) + parity_witnesses(pair))
        return np.asarray(local_hamiltonian(orbits).dense)

    reference = local(1.0)
    for c in (0.5, 2.0, 5.0):
        assert_allclose(local(c), reference, atol=1e-10)


def test_product_point_ground_space_holds_both_branches():
    n = 6
    pair = build_model(ModelTag.A, g=0.5, theta=np.pi)
    branches = branch_states(pair, n)
    report = ground_check(_parent_chain(pair, n), branches)
    assert report.ground_dimension >= 2
    for energy, overlap in zip(report.rayleigh, report.overlaps):
        assert abs(energy) < 1e-10 * report.norm_bound
        assert overlap > 1 - 1e-8


def test_reversal_residual_of_parity_symmetric_state(random_pair):
    pair = random_pair()
    witness = find_parity_witness(pair)
    assert witness is not None
    assert verify_witness(pair, witness) < 1e-9
    assert state_symmetry_check(mps_to_dense(pair, 7)).reversal_residual < 1e-12


def test_symmetry_residual_keeps_small_asymmetries(rng):
    v, w = rng.normal(size=16) + 1j * rng.normal(size=16), rng.normal(size=16)
    symmetric, odd = v + v[::-1], w - w[::-1]
    psi = symmetric + 1e-11 * odd
    residual = state_symmetry_check(DenseState(n=4, amplitudes=psi)).spin_flip_residual
    assert_allclose(residual, 2e-11 * np.linalg.norm(odd) / np.linalg.norm(psi), rtol=1e-3)


_PAULI = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Z": np.diag([1, -1])}


def _three_site(words):
    h = np.zeros((8, 8), dtype=complex)
    for word, coefficient in words.items():
        padded = word if len(word) == 3 else {"ZZ": "ZZI", "X": "IXI"}[word]
        term = np.ones((1, 1))
        for letter in padded:
            term = np.kron(term, _PAULI[letter])
        h += coefficient * term
    return h


@pytest.mark.parametrize("theta", [np.pi / 4, np.pi / 2, 3 * np.pi / 4])
def test_cirac_state_is_ground_state_of_its_printed_chain(theta):
    n = 6
    q = (1 + np.cos(theta)) / 2
    chain = assemble_chain(local_from_dense(_three_site(printed_cirac(q))), n)
    report = ground_check(chain, [mps_to_dense(build_cirac(q), n)])
    assert report.overlaps[0] > 1 - 1e-8
    assert abs(report.rayleigh[0] - report.lambda_min) < 1e-9 * report.norm_bound

