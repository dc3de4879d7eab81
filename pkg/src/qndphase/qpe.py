"""Discrete phase estimation on an exact state vector.

The joint register is ordered index ⊗ target, so the cascade of controlled
powers is block diagonal with blocks ``U**j`` in natural order of ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import config
from .linalg import (
    DimensionError,
    NotUnitaryError,
    as_matrix,
    as_vector,
    frobenius_norm,
    hermitian_expi,
    kron,
)
from .registers import HADAMARD, lambda_operator

if TYPE_CHECKING:
    from .problem import QpeProblem

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-9
TARGET_NORM_TOL = 1e-6
UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class QuantumState:
    """Joint state vector with ``index_qubits`` high-order index qubits."""

    amplitudes: np.ndarray
    index_qubits: int = 0

    def __post_init__(self):
        amps = as_vector(self.amplitudes)
        n = amps.size.bit_length() - 1
        if amps.size != 2**n:
            raise DimensionError(f"state dimension {amps.size} is not a power of two")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        if not 0 <= self.index_qubits <= n:
            raise ValueError(f"index_qubits={self.index_qubits} exceeds {n} total qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def target_dim(self) -> int:
        return self.amplitudes.size >> self.index_qubits

    def blocks(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2**index_qubits, target_dim)``."""
        return self.amplitudes.reshape(2**self.index_qubits, self.target_dim)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class QpeResult:
    distribution: np.ndarray
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        total = float(np.sum(self.distribution))
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"distribution sums to {total!r}")

    @property
    def m(self) -> int:
        return len(self.distribution).bit_length() - 1

    @property
    def phase_estimates(self) -> np.ndarray:
        return TWO_PI * np.asarray(self.samples, dtype=float) / len(self.distribution)

    def to_dict(self) -> dict:
        return {
            "distribution": [float(p) for p in self.distribution],
            "samples": [int(s) for s in self.samples],
            "phase_estimates": [float(p) for p in self.phase_estimates],
        }


def _check_target(target) -> np.ndarray:
    t = as_vector(target)
    if t.size < 2 or t.size & (t.size - 1):
        raise DimensionError(f"target dimension must be 2**t with t >= 1, got {t.size}")
    norm = float(np.linalg.norm(t))
    if abs(norm - 1.0) > TARGET_NORM_TOL:
        raise ValueError(f"target state is not normalized (norm {norm!r})")
    return t / norm


def _check_width(m: int, target_dim: int) -> None:
    total = m + target_dim.bit_length() - 1
    cap = config.max_qubits()
    if m < 1 or total > cap:
        raise DimensionError(f"{m} index + target qubits = {total} exceeds the cap of {cap}")


def apply_single_qubit(amplitudes: np.ndarray, gate: np.ndarray, qubit: int, num_qubits: int) -> np.ndarray:
    """Apply a 2x2 ``gate`` to ``qubit`` (weight ``2**qubit``) of a state vector."""
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(
        2 ** (num_qubits - 1 - qubit), 2, 2**qubit
    )
    return np.einsum("ab,ibj->iaj", gate, psi).reshape(-1)


def initialize(m: int, target) -> QuantumState:
    """Build ``|0̄>_I |φ>_T`` by a Hadamard on every index qubit of ``|0...0>``."""
    t = _check_target(target)
    _check_width(m, t.size)
    n = m + t.size.bit_length() - 1
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[: t.size] = t  # index register in |0...0>
    for k in range(m):
        psi = apply_single_qubit(psi, HADAMARD, n - m + k, n)
    return QuantumState(psi, index_qubits=m)


def unitary_powers(u, m: int) -> list[np.ndarray]:
    """``[U, U**2, U**4, ..., U**(2**(m-1))]`` by repeated squaring."""
    p = as_matrix(u)
    powers = []
    for _ in range(m):
        powers.append(p)
        p = p @ p
    return powers


def _check_unitary(u, tol: float) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {u.shape}")
    dev = frobenius_norm(u @ u.conj().T - np.eye(u.shape[0]))
    if dev > tol:
        raise NotUnitaryError(f"matrix is not unitary: ||UU^dagger - I||_F = {dev:.3e}")
    return u


def controlled_power_cascade(
    state: QuantumState, u, m: int | None = None, tol: float = UNITARY_TOL
) -> QuantumState:
    """Apply controlled ``U**(2**k)`` gates, index qubit ``k`` as control.

    The product of the ``m`` gates equals ``U**Λ = Σ_j |j><j| ⊗ U**j``.
    """
    u = _check_unitary(u, tol)
    m = state.index_qubits if m is None else m
    if m != state.index_qubits:
        raise ValueError(f"state has {state.index_qubits} index qubits, cascade asked for {m}")
    if u.shape[0] != state.target_dim:
        raise DimensionError(f"unitary of dim {u.shape[0]} on target of dim {state.target_dim}")
    psi = state.blocks().copy()
    j = np.arange(2**m)
    for k, uk in enumerate(unitary_powers(u, m)):
        rows = (j >> k) & 1 == 1
        psi[rows] = psi[rows] @ uk.T
    return QuantumState(psi.reshape(-1), index_qubits=m)


def cascade_operator(u, m: int, tol: float = UNITARY_TOL) -> np.ndarray:
    """Full joint matrix of the controlled-power cascade, gate by gate."""
    u = _check_unitary(u, tol)
    d = u.shape[0]
    dim = 2**m
    j = np.arange(dim)
    out = np.eye(dim * d, dtype=np.complex128)
    for k, uk in enumerate(unitary_powers(u, m)):
        set_k = ((j >> k) & 1).astype(np.complex128)
        gate = kron(np.diag(1.0 - set_k), np.eye(d)) + kron(np.diag(set_k), uk)
        out = gate @ out
    return out


def interaction_operator(h_u, m: int, tol: float = config.DEFAULT_TOL) -> np.ndarray:
    """``exp(i Λ ⊗ H_U)`` on index ⊗ target."""
    return hermitian_expi(kron(lambda_operator(m), as_matrix(h_u)), 1.0, tol)


def apply_inverse_qft(state: QuantumState) -> np.ndarray:
    """Index amplitudes after ``Q⁻¹`` on the index register, shape ``(M, d)``.

    ``Q⁻¹[k, j] = exp(-2πi jk/M)/sqrt(M)``, which is exactly the unnormalized
    forward FFT along the index axis.
    """
    psi = state.blocks()
    return np.fft.fft(psi, axis=0) / math.sqrt(psi.shape[0])


def index_distribution(state: QuantumState) -> np.ndarray:
    """Outcome probabilities of measuring the index register in the FT basis."""
    probs = np.sum(np.abs(apply_inverse_qft(state)) ** 2, axis=1)
    return probs / probs.sum()


def exact_distribution(phi: float, m: int) -> np.ndarray:
    """Closed-form outcome distribution for an eigenstate with eigenphase ``phi``.

    ``P(k) = sin²(Mδ/2) / (M² sin²(δ/2))`` with ``δ = φ - 2πk/M``; the removable
    singularity at ``δ ≡ 0`` is evaluated as the geometric sum itself.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    dim = 2**m
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    delta = phi - TWO_PI * np.arange(dim) / dim
    half = delta / 2.0
    den = np.sin(half)
    small = np.abs(den) < 1e-7
    probs = np.empty(dim)
    ok = ~small
    probs[ok] = (np.sin(dim * half[ok]) / (dim * den[ok])) ** 2
    if np.any(small):
        j = np.arange(dim)
        amp = np.exp(1j * np.outer(delta[small], j)).sum(axis=1) / dim
        probs[small] = np.abs(amp) ** 2
    return probs


def sample_outcomes(distribution, shots: int, rng) -> np.ndarray:
    """Inverse-CDF sampling from ``distribution``."""
    if shots < 0:
        raise ValueError(f"shots must be >= 0, got {shots}")
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(distribution)
    draws = rng.random(shots) * cdf[-1]
    idx = np.searchsorted(cdf, draws, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.int64)


def simulate(u, target, m: int, tol: float = UNITARY_TOL) -> np.ndarray:
    """Exact outcome distribution of the full circuit for ``u`` and ``target``."""
    state = controlled_power_cascade(initialize(m, target), u, m, tol)
    return index_distribution(state)


def run_qpe(problem: "QpeProblem", shots: int | None = None, seed=None) -> QpeResult:
    """Run a parsed problem; ``shots``/``seed`` override the problem's own."""
    u, target = problem.resolve()
    shots = problem.shots if shots is None else shots
    seed = problem.seed if seed is None else seed
    dist = simulate(u, target, problem.index_bits)
    return QpeResult(dist, sample_outcomes(dist, shots, seed))


def run_qpe_via_hamiltonian(
    h_u, target, m: int, shots: int = 0, seed=None, tol: float = config.DEFAULT_TOL
) -> QpeResult:
    """Same decode as :func:`run_qpe`, entangling with ``exp(i Λ ⊗ H_U)`` directly."""
    t = _check_target(target)
    h_u = as_matrix(h_u)
    if h_u.shape != (t.size, t.size):
        raise DimensionError(f"generator of shape {h_u.shape} on target of dim {t.size}")
    state = initialize(m, t)
    joint = interaction_operator(h_u, m, tol)
    out = QuantumState(joint @ state.amplitudes, index_qubits=m)
    dist = index_distribution(out)
    return QpeResult(dist, sample_outcomes(dist, shots, seed))


def reduced_target(state: QuantumState) -> np.ndarray:
    """Target-register density matrix after tracing out the index."""
    psi = state.blocks()
    return psi.T @ psi.conj()
