import numpy as np
import pytest

from hmin.basis import bloch_decompose, gamma_of_sqrt, gell_mann_basis
from hmin.errors import InvalidDimension, NotHermitian
from hmin.states import bell_diagonal, bell_state, pure_state, random_density

from conftest import I2, SX, SY, SZ, random_hermitian


def test_qubit_basis_is_scaled_paulis():
    b = gell_mann_basis(2)
    expected = [I2, SX, SY, SZ]
    for e, x in zip(expected, b.elements):
        np.testing.assert_allclose(x, e / np.sqrt(2))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_basis_orthonormal(m):
    b = gell_mann_basis(m)
    assert len(b) == m * m
    np.testing.assert_allclose(b.gram(), np.eye(m * m), atol=1e-12)
    np.testing.assert_array_equal(b.elements[0], np.eye(m) / np.sqrt(m))
    traces = [np.trace(x) for x in b.elements[1:]]
    np.testing.assert_allclose(traces, 0, atol=1e-14)
    for x in b.elements:
        np.testing.assert_allclose(x, x.conj().T)


def test_invalid_dimension():
    with pytest.raises(InvalidDimension):
        gell_mann_basis(1)


def test_maximally_mixed_decomposition():
    g = bloch_decompose(np.eye(4) / 4, 2, 2).gamma
    expected = np.zeros((4, 4))
    expected[0, 0] = 0.5
    np.testing.assert_allclose(g, expected, atol=1e-15)


def test_bell_diagonal_correlation_block():
    c = (0.3, -0.2, 0.5)
    bd = bloch_decompose(bell_diagonal(c).matrix, 2, 2)
    np.testing.assert_allclose(bd.T, np.diag(c) / 2, atol=1e-14)
    np.testing.assert_allclose(bd.x, 0, atol=1e-15)
    np.testing.assert_allclose(bd.y, 0, atol=1e-15)


def test_explicit_trace_oracle(rng):
    h = random_hermitian(6, rng)
    bd = bloch_decompose(h, 2, 3)
    xs, ys = gell_mann_basis(2).elements, gell_mann_basis(3).elements
    for i in range(4):
        for j in range(9):
            assert np.isclose(bd.gamma[i, j], np.trace(h @ np.kron(xs[i], ys[j])).real)
    assert np.isclose(bd.gamma[0, 0], np.trace(h).real / np.sqrt(6))
    np.testing.assert_allclose(bd.reconstruct(), h, atol=1e-10)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        bloch_decompose(np.triu(np.ones((4, 4))), 2, 2)


def test_gamma_of_sqrt_examples():
    prod = pure_state([1, 0, 0, 0], 2, 2)
    g = gamma_of_sqrt(prod).gamma
    assert np.linalg.matrix_rank(g @ g.T, tol=1e-12) == 1

    mixed = random_density(2, 2, seed=0)
    mixed = type(mixed)(np.eye(4) / 4, 2, 2)
    g = gamma_of_sqrt(mixed).gamma
    assert np.isclose(g[0, 0], 1.0) and np.count_nonzero(np.abs(g) > 1e-14) == 1

    g = gamma_of_sqrt(bell_state()).gamma
    np.testing.assert_allclose(np.linalg.eigvalsh(g @ g.T), [0.25] * 4, atol=1e-12)
