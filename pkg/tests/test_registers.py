import math

import numpy as np
import pytest

from qndphase.linalg import commutator, frobenius_norm, hermitian_eig, kron
from qndphase.registers import (
    HADAMARD,
    RegisterSpec,
    basis_state,
    ft_basis_state,
    gamma_operator,
    lambda_operator,
    qft_matrix,
)


def test_basis_state_13():
    ket0, ket1 = np.array([1, 0]), np.array([0, 1])
    product = np.kron(np.kron(np.kron(ket1, ket1), ket0), ket1)
    v = basis_state(4, 13)
    np.testing.assert_array_equal(v, product)
    assert np.flatnonzero(v).tolist() == [13]


def test_basis_state_small():
    np.testing.assert_array_equal(basis_state(1, 0), [1, 0])
    ket0, ket1 = np.array([1, 0]), np.array([0, 1])
    np.testing.assert_array_equal(basis_state(3, 5), np.kron(np.kron(ket1, ket0), ket1))


@pytest.mark.parametrize("m, x", [(1, 2), (3, -1), (2, 4)])
def test_basis_state_range(m, x):
    with pytest.raises(ValueError):
        basis_state(m, x)


def test_register_spec():
    assert RegisterSpec(3).dim == 8
    with pytest.raises(ValueError):
        RegisterSpec(0)


def test_lambda_small():
    np.testing.assert_array_equal(lambda_operator(1), np.diag([0, 1]))
    np.testing.assert_array_equal(lambda_operator(2), np.diag([0, 1, 2, 3]))


def test_lambda_on_13():
    np.testing.assert_array_equal(lambda_operator(4) @ basis_state(4, 13), 13 * basis_state(4, 13))


@pytest.mark.parametrize("m", range(1, 7))
def test_lambda_eigenvalues_are_labels(m):
    lam = lambda_operator(m)
    for x in range(2**m):
        np.testing.assert_array_equal(lam @ basis_state(m, x), x * basis_state(m, x))


def test_qft_one_qubit_is_hadamard():
    np.testing.assert_allclose(qft_matrix(1), HADAMARD, atol=1e-15)


def test_qft_two_qubits():
    expected = np.array([[1j ** (x * y) for x in range(4)] for y in range(4)]) / 2
    np.testing.assert_allclose(qft_matrix(2), expected, atol=1e-15)


@pytest.mark.parametrize("m", range(1, 9))
def test_qft_unitary_and_zero_column(m):
    q = qft_matrix(m)
    assert frobenius_norm(q @ q.conj().T - np.eye(2**m)) < 1e-10
    np.testing.assert_allclose(q @ basis_state(m, 0), np.full(2**m, 2 ** (-m / 2)), atol=1e-15)


def test_gamma_one_qubit():
    np.testing.assert_allclose(gamma_operator(1), 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
    minus = np.array([1, -1]) / math.sqrt(2)
    np.testing.assert_allclose(gamma_operator(1) @ minus, minus, atol=1e-15)
    # the single-qubit form H (I - Z) H / 2
    h = HADAMARD
    np.testing.assert_allclose(gamma_operator(1), h @ (np.eye(2) - np.diag([1, -1])) @ h / 2, atol=1e-15)


@pytest.mark.parametrize("m", range(1, 7))
def test_gamma_ft_eigenrelation(m):
    gamma = gamma_operator(m)
    assert frobenius_norm(gamma - gamma.conj().T) < 1e-12
    for x in range(2**m):
        ket = ft_basis_state(m, x)
        assert np.linalg.norm(gamma @ ket - x * ket) < 1e-9
    np.testing.assert_allclose(gamma @ ft_basis_state(m, 0), 0, atol=1e-9)


@pytest.mark.parametrize("m", range(1, 7))
def test_isospectral(m):
    labels = np.arange(2**m)
    np.testing.assert_allclose(hermitian_eig(lambda_operator(m))[0], labels, atol=1e-9)
    np.testing.assert_allclose(hermitian_eig(gamma_operator(m))[0], labels, atol=1e-9)


@pytest.mark.parametrize("m", range(1, 7))
def test_lambda_gamma_do_not_commute(m):
    assert frobenius_norm(commutator(lambda_operator(m), gamma_operator(m))) > 0.1


def test_lambda_equals_kron_structure():
    # Λ(m) = Λ(1) ⊗ I * 2**(m-1) + I ⊗ Λ(m-1) for the high-order qubit split
    for m in range(2, 6):
        high = kron(lambda_operator(1), np.eye(2 ** (m - 1))) * 2 ** (m - 1)
        low = kron(np.eye(2), lambda_operator(m - 1))
        np.testing.assert_array_equal(lambda_operator(m), high + low)
