"""Register operators: integer encoding, Λ, the QFT matrix Q and Γ = QΛQ⁻¹.

Bit convention: qubit ``j`` carries weight ``2**j`` and the leftmost tensor
factor is qubit ``m - 1``, so ``|1>|1>|0>|1>`` is the basis state ``|13>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .linalg import kron_all

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True)
class RegisterSpec:
    m: int

    def __post_init__(self):
        _check_m(self.m)

    @property
    def dim(self) -> int:
        return 2**self.m


def _check_m(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise TypeError(f"qubit count must be an integer, got {m!r}")
    cap = config.max_qubits()
    if not 1 <= m <= cap:
        raise ValueError(f"qubit count must lie in [1, {cap}], got {m}")


def basis_state(m: int, x: int) -> np.ndarray:
    _check_m(m)
    if not 0 <= x < 2**m:
        raise ValueError(f"basis index {x} out of range for {m} qubits")
    v = np.zeros(2**m, dtype=np.complex128)
    v[x] = 1.0
    return v


def lambda_operator(m: int) -> np.ndarray:
    """Λ for an ``m`` qubit register, summed term by term.

    Term ``j`` places ``2**(j-1) * (I - Z)`` on qubit ``j`` and identities
    elsewhere. ``I - Z = diag(0, 2)``, so each term contributes ``2**j``
    when qubit ``j`` is set and Λ|x> = x|x>.
    """
    _check_m(m)
    out = np.zeros((2**m, 2**m), dtype=np.complex128)
    for j in range(m):
        factors = [I2] * m
        # factors[0] is the leftmost tensor slot, i.e. qubit m - 1
        factors[m - 1 - j] = 2.0 ** (j - 1) * (I2 - Z)
        out += kron_all(*factors)
    return out


def qft_matrix(m: int) -> np.ndarray:
    """``Q[y, x] = exp(+2πi xy / M) / sqrt(M)`` with ``M = 2**m``."""
    _check_m(m)
    dim = 2**m
    k = np.arange(dim)
    # reduce xy mod M before scaling so large registers keep exact phases
    phase = 2.0j * np.pi * (np.outer(k, k) % dim) / dim
    return np.exp(phase) / np.sqrt(dim)


def gamma_operator(m: int) -> np.ndarray:
    q = qft_matrix(m)
    gamma = q @ lambda_operator(m) @ q.conj().T
    return 0.5 * (gamma + gamma.conj().T)


def ft_basis_state(m: int, x: int) -> np.ndarray:
    """The Fourier-basis state ``|x̄> = Q|x>``."""
    return qft_matrix(m) @ basis_state(m, x)
