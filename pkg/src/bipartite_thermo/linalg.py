"""Dense complex linear algebra on the product space C^m (x) C^n.

Matrices are plain 2-D ``numpy`` complex arrays. Subsystem A is always the
slow (outer) tensor index, so the joint basis index of ``|i>_A |alpha>_B`` is
``i * n + alpha``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotHermitianError

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14


def _square(M, name="matrix"):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def dagger(M):
    return np.conj(M).T


def kron(A, B):
    """Tensor product with A as the outer index: ``out[i*n+a, j*n+b] = A[i,j] B[a,b]``."""
    A = _square(A, "A")
    B = _square(B, "B")
    return np.kron(A, B)


def embed_A(X, n):
    """Lift an operator on A to the product space as ``X (x) 1_n``."""
    return kron(X, np.eye(n))


def embed_B(X, m):
    """Lift an operator on B to the product space as ``1_m (x) X``."""
    return kron(np.eye(m), X)


def _check_partition(rho, m, n):
    rho = _square(rho, "rho")
    if m < 1 or n < 1 or rho.shape[0] != m * n:
        raise DimensionError(
            f"cannot partition a {rho.shape[0]}-dimensional matrix as {m} x {n}"
        )
    return rho.reshape(m, n, m, n)


def partial_trace_B(rho, m, n):
    """Reduced matrix of A: ``out[i,j] = sum_a rho[i*n+a, j*n+a]``."""
    return np.einsum("iaja->ij", _check_partition(rho, m, n))


def partial_trace_A(rho, m, n):
    """Reduced matrix of B: ``out[a,b] = sum_i rho[i*n+a, i*n+b]``."""
    return np.einsum("iaib->ab", _check_partition(rho, m, n))


def commutator(A, B):
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"commutator of {A.shape} and {B.shape}")
    return A @ B - B @ A


def anticommutator(A, B):
    return A @ B + B @ A


def hermiticity_error(M):
    """Frobenius norm of the anti-Hermitian part ``M - M^dagger``."""
    return float(np.linalg.norm(M - dagger(M)))


@dataclass(frozen=True)
class HermitianEig:
    """Ascending eigenvalues and unitary eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ dagger(self.vectors)


def jacobi_eigh(H, tol=JACOBI_TOL, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``H[p, q]`` and then
    applies the real symmetric Jacobi rotation that zeroes it. Sweeps stop
    once the off-diagonal Frobenius mass falls below ``tol * ||H||_F``.

    Returns ``(values, vectors)`` sorted ascending.
    """
    A = np.array(H, dtype=complex)
    d = A.shape[0]
    V = np.eye(d, dtype=complex)
    scale = np.linalg.norm(A)
    if d == 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V

    def off(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    for _ in range(max_sweeps):
        if off(A) < tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = dagger(G) @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ G
    else:
        if off(A) >= tol * scale:
            raise RuntimeError("Jacobi iteration did not converge")

    values = np.real(np.diag(A))
    order = np.argsort(values, kind="stable")
    return values[order], V[:, order]


def hermitian_eigen(H, method="lapack", tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(H + H^dagger)/2`` after checking that its
    anti-Hermitian part is below ``tol * ||H||_F``. ``method="jacobi"`` uses
    :func:`jacobi_eigh`; the default calls LAPACK through ``numpy``.
    """
    H = _square(H, "H").astype(complex)
    norm = np.linalg.norm(H)
    if hermiticity_error(H) > tol * max(norm, 1.0):
        raise NotHermitianError(
            f"||H - H^dagger||_F = {hermiticity_error(H):.3e} exceeds {tol:g} * ||H||_F"
        )
    Hs = 0.5 * (H + dagger(H))
    if method == "jacobi":
        values, vectors = jacobi_eigh(Hs)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(Hs)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return HermitianEig(values=values, vectors=vectors)


@dataclass(frozen=True)
class DensityReport:
    trace_err: float
    hermiticity_err: float
    min_eigenvalue: float
    tol: float

    @property
    def valid(self):
        return (
            self.trace_err <= self.tol
            and self.hermiticity_err <= self.tol
            and self.min_eigenvalue > -self.tol
        )

    def __bool__(self):
        return self.valid


def is_valid_density(rho, tol=1e-8):
    """Diagnose trace, Hermiticity and positivity of ``rho``; never raises on bad states."""
    rho = _square(rho, "rho")
    trace_err = abs(np.trace(rho) - 1.0)
    herm_err = hermiticity_error(rho)
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    return DensityReport(float(trace_err), herm_err, float(lam[0]), tol)


def random_density(dim, rng, rank=None):
    """Random full-rank (or given rank) density matrix from a Ginibre draw."""
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ dagger(G)
    return rho / np.trace(rho)


def random_hermitian(dim, rng):
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (G + dagger(G))
