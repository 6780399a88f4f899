import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipartite_thermo.errors import DimensionError, NotHermitianError
from bipartite_thermo.linalg import (
    anticommutator, commutator, dagger, embed_A, embed_B, hermitian_eigen, is_valid_density,
    jacobi_eigh, kron, partial_trace_A, partial_trace_B, random_density, random_hermitian,
)

dims = st.integers(min_value=1, max_value=5)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_index_convention():
    A = np.arange(4.0).reshape(2, 2)
    B = np.arange(9.0).reshape(3, 3) + 1
    K = kron(A, B)
    for i in range(2):
        for j in range(2):
            for a in range(3):
                for b in range(3):
                    assert K[i * 3 + a, j * 3 + b] == A[i, j] * B[a, b]


def test_partial_traces_of_product_state(rng):
    rA, rB = random_density(3, rng), random_density(4, rng)
    rho = kron(rA, rB)
    np.testing.assert_allclose(partial_trace_B(rho, 3, 4), rA, atol=1e-15)
    np.testing.assert_allclose(partial_trace_A(rho, 3, 4), rB, atol=1e-15)


def test_partial_trace_of_bell_state_is_maximally_mixed():
    psi = np.zeros(4)
    psi[0] = psi[3] = 2 ** -0.5
    rho = np.outer(psi, psi)
    np.testing.assert_allclose(partial_trace_B(rho, 2, 2), np.eye(2) / 2)
    np.testing.assert_allclose(partial_trace_A(rho, 2, 2), np.eye(2) / 2)


@pytest.mark.parametrize("m,n", [(2, 5), (3, 15), (4, 1)])
def test_partial_trace_bad_partition(m, n):
    with pytest.raises(DimensionError):
        partial_trace_B(np.eye(m * n + 1), m, n)


@settings(max_examples=40, deadline=None)
@given(m=dims, n=dims, seed=seeds)
def test_reduced_expectation_identity(m, n, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(m * n, rng)
    X = random_hermitian(m, rng)
    Y = random_hermitian(n, rng)
    assert abs(np.trace(partial_trace_B(rho, m, n) @ X) - np.trace(rho @ embed_A(X, n))) < 1e-12
    assert abs(np.trace(partial_trace_A(rho, m, n) @ Y) - np.trace(rho @ embed_B(Y, m))) < 1e-12


def test_embedded_operators_commute(rng):
    X, Y = random_hermitian(3, rng), random_hermitian(4, rng)
    assert np.linalg.norm(commutator(embed_A(X, 4), embed_B(Y, 3))) < 1e-12


def test_commutator_shapes():
    with pytest.raises(DimensionError):
        commutator(np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        commutator(np.ones((2, 3)), np.ones((2, 3)))


def test_anticommutator_of_paulis_vanishes():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(anticommutator(sx, sy), 0)
    assert np.allclose(commutator(sx, sy), 2j * np.diag([1, -1]))


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
@pytest.mark.parametrize("d", [1, 2, 3, 8, 20])
def test_eigen_reconstruction(method, d, rng):
    H = random_hermitian(d, rng)
    eig = hermitian_eigen(H, method=method)
    assert np.all(np.diff(eig.values) >= 0)
    assert np.linalg.norm(eig.reconstruct() - H) < 1e-12 * max(1, np.linalg.norm(H))
    V = eig.vectors
    assert np.linalg.norm(dagger(V) @ V - np.eye(d)) < 1e-12


def test_jacobi_agrees_with_lapack(rng):
    H = random_hermitian(15, rng)
    np.testing.assert_allclose(jacobi_eigh(H)[0], np.linalg.eigvalsh(H), atol=1e-12)


def test_jacobi_degenerate_and_diagonal():
    vals, vecs = jacobi_eigh(np.diag([2.0, 2.0, -1.0]).astype(complex))
    np.testing.assert_allclose(vals, [-1, 2, 2])
    vals, _ = jacobi_eigh(np.zeros((3, 3), dtype=complex))
    np.testing.assert_allclose(vals, 0)


def test_pauli_y_eigen():
    sy = np.array([[0, -1j], [1j, 0]])
    eig = hermitian_eigen(sy, method="jacobi")
    np.testing.assert_allclose(eig.values, [-1, 1], atol=1e-15)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigen(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        hermitian_eigen(np.eye(2), method="qr")


def test_density_report():
    assert is_valid_density(np.diag([0.5, 0.5]))
    bad = is_valid_density(np.diag([1.2, -0.2]))
    assert not bad.valid
    assert bad.min_eigenvalue == pytest.approx(-0.2)
    assert not is_valid_density(np.diag([0.6, 0.6]))
    assert not is_valid_density(np.array([[0.5, 0.1], [0.2, 0.5]]))


@settings(max_examples=25, deadline=None)
@given(d=st.integers(min_value=1, max_value=8), seed=seeds)
def test_random_density_is_valid(d, seed):
    assert is_valid_density(random_density(d, np.random.default_rng(seed)), tol=1e-12)
