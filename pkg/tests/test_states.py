import json

import numpy as np
import pytest

from hmin import states as st
from hmin.errors import DimensionMismatch, HminError, InvalidRank, InvalidSchmidt, NotHermitian, NotPSD, OutOfRange

from conftest import SX, SY, SZ


def test_density_matrix_validation():
    with pytest.raises(DimensionMismatch):
        st.DensityMatrix(np.eye(3) / 3, 2, 2)
    with pytest.raises(NotHermitian):
        st.DensityMatrix(np.array([[0.5, 1], [0, 0.5]]), 2, 1)
    with pytest.raises(HminError):
        st.DensityMatrix(np.eye(4) / 8, 2, 2)
    with pytest.raises(NotPSD):
        st.DensityMatrix(np.diag([1.5, -0.5]), 2, 1)


def test_density_matrix_is_read_only():
    rho = st.bell_state()
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_bell_state_matrix():
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    np.testing.assert_allclose(st.bell_state().matrix, expected)
    np.testing.assert_allclose(st.bell_state().marginal("b"), np.eye(2) / 2)


def test_bell_diagonal_matches_pauli_expansion():
    c = (0.8, -0.6, 0.4)
    rho = st.bell_diagonal(c)
    expected = (np.eye(4) + sum(ci * np.kron(s, s) for ci, s in zip(c, (SX, SY, SZ)))) / 4
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)
    # eigenvalues on the four Bell vectors
    r2 = 1 / np.sqrt(2)
    bells = [np.array(v) * r2 for v in ([1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0])]
    lam = [np.vdot(b, rho.matrix @ b).real for b in bells]
    np.testing.assert_allclose(lam, st.bell_diagonal_eigenvalues(c), atol=1e-14)


def test_bell_diagonal_rejects_unphysical():
    # (0.8, 0.6, 0.4) puts weight -0.2 on the singlet
    assert st.bell_diagonal_eigenvalues((0.8, 0.6, 0.4))[3] == pytest.approx(-0.2)
    with pytest.raises(NotPSD):
        st.bell_diagonal((0.8, 0.6, 0.4))


def test_isotropic_and_werner_special_points():
    np.testing.assert_allclose(st.isotropic(2, 0.25).matrix, np.eye(4) / 4, atol=1e-15)
    np.testing.assert_allclose(st.isotropic(2, 1.0).matrix, st.bell_state().matrix, atol=1e-15)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(st.werner(2, -1.0).matrix, np.outer(singlet, singlet), atol=1e-15)
    np.testing.assert_allclose(st.werner(3, 1 / 3).matrix, np.eye(9) / 9, atol=1e-15)
    with pytest.raises(OutOfRange):
        st.isotropic(2, 1.2)
    with pytest.raises(OutOfRange):
        st.werner(2, -1.5)


def test_werner_flip_expectation():
    # tr(rho F) = x for the Werner family
    for d in (2, 3):
        for x in (-1.0, 0.0, 0.7):
            rho = st.werner(d, x)
            assert np.trace(rho.matrix @ st.flip_operator(d)).real == pytest.approx(x)


def test_schmidt_validation():
    with pytest.raises(InvalidSchmidt):
        st.SchmidtForm((0.5, 0.6), 2, 2)
    with pytest.raises(InvalidSchmidt):
        st.SchmidtForm((1.2, -0.2), 2, 2)
    with pytest.raises(InvalidSchmidt):
        st.SchmidtForm((0.3, 0.3, 0.4), 2, 3)


def test_pure_from_schmidt_marginal_spectrum(rng):
    s = st.SchmidtForm((0.7, 0.2, 0.1), 3, 4)
    rho = st.pure_from_schmidt(s, st.random_unitary(3, rng), st.random_unitary(4, rng))
    np.testing.assert_allclose(np.linalg.eigvalsh(rho.marginal("a")), [0.1, 0.2, 0.7], atol=1e-12)
    assert rho.purity() == pytest.approx(1.0)


def test_random_density_rank_and_seed():
    rho = st.random_density(2, 3, rank=2, seed=4)
    assert np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-12) == 2
    np.testing.assert_array_equal(rho.matrix, st.random_density(2, 3, rank=2, seed=4).matrix)
    with pytest.raises(InvalidRank):
        st.random_density(2, 2, rank=5)


def test_random_unitary_is_unitary():
    u = st.random_unitary(4, 9)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_ancilla_and_swap():
    rho = st.random_density(2, 3, seed=2)
    sigma = np.diag([0.25, 0.75])
    big = st.attach_ancilla(rho, sigma)
    assert big.dims == (2, 6)
    np.testing.assert_allclose(big.marginal("a"), rho.marginal("a"), atol=1e-14)
    with pytest.raises(HminError):
        st.attach_ancilla(rho, np.diag([0.5, 0.6]))
    sw = st.swap_subsystems(rho)
    assert sw.dims == (3, 2)
    np.testing.assert_allclose(sw.marginal("a"), rho.marginal("b"), atol=1e-14)


def test_rebalanced_marginal():
    rho = st.with_maximally_mixed_marginal(st.random_density(2, 3, seed=8))
    np.testing.assert_allclose(rho.marginal("a"), np.eye(2) / 2, atol=1e-12)


def test_json_roundtrip(tmp_path):
    rho = st.random_density(2, 3, seed=1)
    path = tmp_path / "rho.json"
    st.save_state(rho, path)
    obj = json.loads(path.read_text())
    assert obj["m"] == 2 and obj["n"] == 3 and len(obj["matrix"]) == 6
    np.testing.assert_array_equal(st.load_state(path).matrix, rho.matrix)


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        '{"m": 2, "n": 2}',
        '{"m": 2, "n": 2, "matrix": [[1, 0], [0, 1]]}',
        '{"m": "2", "n": 1, "matrix": [[[1, 0]]]}',
    ],
)
def test_load_state_rejects_corrupt_files(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(HminError):
        st.load_state(path)
