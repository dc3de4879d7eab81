"""Dense complex linear algebra used throughout the package.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Hermitian eigendecompositions go through a cyclic Jacobi sweep rather than
LAPACK so that every exponential in the package shares one code path.
"""

from __future__ import annotations

import math

import numpy as np

from . import config


class LinalgError(ValueError):
    """Base class for invalid linear-algebra inputs."""


class DimensionError(LinalgError):
    pass


class NotHermitianError(LinalgError):
    pass


class NotUnitaryError(LinalgError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def as_vector(v) -> np.ndarray:
    vec = np.asarray(v, dtype=np.complex128)
    if vec.ndim == 2 and 1 in vec.shape:
        vec = vec.reshape(-1)
    if vec.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {vec.shape}")
    return vec


def _require_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def frobenius_norm(a) -> float:
    a = np.asarray(a)
    return float(math.sqrt(np.sum(np.abs(a) ** 2)))


def is_hermitian(a, tol: float = config.DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return frobenius_norm(a - a.conj().T) <= tol


def is_unitary(a, tol: float = config.DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return frobenius_norm(a @ a.conj().T - np.eye(a.shape[0])) <= tol


def is_diagonal(a, tol: float = config.DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    return frobenius_norm(a - np.diag(np.diag(a))) <= tol


def kron(a, b, max_dim: int | None = None) -> np.ndarray:
    """Kronecker product ``a ⊗ b``; ``a`` is the high-order (leftmost) factor.

    Raises:
        DimensionError: if either output dimension exceeds ``max_dim``
            (default ``2 ** config.max_qubits()``).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    limit = config.max_dim() if max_dim is None else max_dim
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > limit or cols > limit:
        raise DimensionError(
            f"kron result {rows}x{cols} exceeds the configured maximum dimension {limit}"
        )
    return np.kron(a, b)


def kron_all(*factors, max_dim: int | None = None) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = kron(out, f, max_dim=max_dim)
    return out


def commutator(a, b) -> np.ndarray:
    """Return ``ab - ba``."""
    a = as_matrix(a)
    b = as_matrix(b)
    _require_square(a, "a")
    _require_square(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"commutator of {a.shape} and {b.shape} matrices")
    return a @ b - b @ a


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # Zero a[p, q] in place with a unitary acting on coordinates p, q.
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
    c, s = math.cos(theta), math.sin(theta)
    # R = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    r = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ r
    a[idx, :] = r.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ r


def hermitian_eig(
    h, tol: float = config.DEFAULT_TOL, max_sweeps: int = 60
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``h = V diag(w) V^†`` by cyclic complex Jacobi.

    Eigenvalues are returned in ascending order with matching columns of
    ``V``. Off-diagonal entries that are already negligible are skipped, so
    block-diagonal inputs (such as ``Λ ⊗ H``) cost little more than their
    blocks.

    Raises:
        NotHermitianError: if ``‖h - h^†‖_F > tol``.
    """
    h = as_matrix(h)
    _require_square(h)
    if not is_hermitian(h, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||h - h^dagger||_F = {frobenius_norm(h - h.conj().T):.3e}"
        )
    n = h.shape[0]
    a = 0.5 * (h + h.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = frobenius_norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    # Entries below this floor cannot move any eigenvalue by more than ~1 ulp.
    floor = 1e-17 * scale
    for _ in range(max_sweeps):
        upper = np.triu(np.abs(a), 1)
        if math.sqrt(2.0 * np.sum(upper**2)) <= 1e-15 * scale:
            break
        rows, cols = np.nonzero(upper > floor)
        if rows.size == 0:
            break
        for p, q in zip(rows.tolist(), cols.tolist()):
            if abs(a[p, q]) > floor:
                _rotate(a, v, p, q)
    else:
        raise LinalgError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_expi(h, scale: float = 1.0, tol: float = config.DEFAULT_TOL) -> np.ndarray:
    """Return ``exp(i * scale * h)`` for Hermitian ``h``."""
    w, v = hermitian_eig(h, tol)
    return (v * np.exp(1j * scale * w)) @ v.conj().T
