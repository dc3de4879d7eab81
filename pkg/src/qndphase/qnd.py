"""Numerical checks of the three QND criteria.

A configuration is valid as a QND measurement of ``A`` with meter ``B`` when

1. ``[H_free, A] = 0``,
2. ``[H_int, A] = 0`` (back-action evasion), and
3. ``[H_int, B] != 0``.

All operators live on the joint system ⊗ meter space; subsystem observables
are lifted by tensoring with the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .linalg import (
    DimensionError,
    NotHermitianError,
    as_matrix,
    commutator,
    frobenius_norm,
    kron,
)
from .registers import gamma_operator, lambda_operator

DEFAULT_CUTOFF = 20
EDGE_ROWS = 2


@dataclass(frozen=True)
class QndTriple:
    """Free Hamiltonian, coupling, QND variable and meter variable.

    ``mask`` optionally restricts the commutator norms to a subset of basis
    states (used to drop Fock-truncation edge rows and columns).
    """

    h_free: np.ndarray
    h_int: np.ndarray
    qnd_var: np.ndarray
    meter_var: np.ndarray
    tolerance: float = config.DEFAULT_TOL
    mask: np.ndarray | None = None

    def __post_init__(self):
        mats = {}
        for name in ("h_free", "h_int", "qnd_var", "meter_var"):
            mats[name] = as_matrix(getattr(self, name))
            object.__setattr__(self, name, mats[name])
        dim = mats["h_int"].shape[0]
        for name, mat in mats.items():
            if mat.shape != (dim, dim):
                raise DimensionError(f"{name} has shape {mat.shape}, expected {(dim, dim)}")
            dev = frobenius_norm(mat - mat.conj().T)
            if dev > self.tolerance:
                raise NotHermitianError(f"{name} is not Hermitian (||M - M^dagger||_F = {dev:.3e})")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != (dim,):
                raise DimensionError(f"mask has shape {mask.shape}, expected {(dim,)}")
            object.__setattr__(self, "mask", mask)

    @property
    def dim(self) -> int:
        return self.h_int.shape[0]

    def conjugated(self, v) -> "QndTriple":
        """All four operators conjugated as ``V M V^†``."""
        v = as_matrix(v)
        vh = v.conj().T
        return QndTriple(
            v @ self.h_free @ vh,
            v @ self.h_int @ vh,
            v @ self.qnd_var @ vh,
            v @ self.meter_var @ vh,
            self.tolerance,
        )


@dataclass(frozen=True)
class QndReport:
    qnd1_norm: float
    qnd2_norm: float
    qnd3_norm: float
    tolerance: float

    @property
    def passed(self) -> tuple[bool, bool, bool]:
        return (
            self.qnd1_norm <= self.tolerance,
            self.qnd2_norm <= self.tolerance,
            self.qnd3_norm > self.tolerance,
        )

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def to_dict(self) -> dict:
        return {
            "qnd1_norm": self.qnd1_norm,
            "qnd2_norm": self.qnd2_norm,
            "qnd3_norm": self.qnd3_norm,
            "tolerance": self.tolerance,
            "passed": list(self.passed),
        }


def _masked_norm(c: np.ndarray, mask: np.ndarray | None) -> float:
    if mask is None:
        return frobenius_norm(c)
    return frobenius_norm(c[np.ix_(mask, mask)])


def check(triple: QndTriple) -> QndReport:
    return QndReport(
        qnd1_norm=_masked_norm(commutator(triple.h_free, triple.qnd_var), triple.mask),
        qnd2_norm=_masked_norm(commutator(triple.h_int, triple.qnd_var), triple.mask),
        qnd3_norm=_masked_norm(commutator(triple.h_int, triple.meter_var), triple.mask),
        tolerance=triple.tolerance,
    )


def qpe_triple(h_u, m: int, tolerance: float = config.DEFAULT_TOL) -> QndTriple:
    """The QND reading of phase estimation on index ⊗ target.

    The circuit model has no free evolution, the coupling is ``Λ ⊗ H_U``,
    the measured variable is ``H_U`` and the meter is ``Γ``.
    """
    h_u = as_matrix(h_u)
    if h_u.shape[0] != h_u.shape[1]:
        raise DimensionError(f"generator must be square, got shape {h_u.shape}")
    dev = frobenius_norm(h_u - h_u.conj().T)
    if dev > tolerance:
        raise NotHermitianError(f"generator is not Hermitian (||H - H^dagger||_F = {dev:.3e})")
    d = h_u.shape[0]
    dim = 2**m
    eye_i = np.eye(dim)
    eye_t = np.eye(d)
    return QndTriple(
        h_free=np.zeros((dim * d, dim * d)),
        h_int=kron(lambda_operator(m), h_u),
        qnd_var=kron(eye_i, h_u),
        meter_var=kron(gamma_operator(m), eye_t),
        tolerance=tolerance,
    )


def annihilation(cutoff: int) -> np.ndarray:
    if cutoff < 2:
        raise ValueError(f"Fock cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(np.complex128)


def quadratures(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated ``X = (a + a^†)/√2`` and ``Y = (a - a^†)/(i√2)``, ``[X, Y] = i``."""
    a = annihilation(cutoff)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2.0), (a - ad) / (1j * math.sqrt(2.0))


def edge_mask(cutoff: int, modes: int = 2, edge: int = EDGE_ROWS) -> np.ndarray:
    """True on joint Fock states whose every mode occupation is below ``cutoff - edge``."""
    keep = np.arange(cutoff) < cutoff - edge
    mask = np.ones(1, dtype=bool)
    for _ in range(modes):
        mask = np.kron(mask, keep).astype(bool)
    return mask


def quadrature_triple(
    chi: float,
    cutoff: int = DEFAULT_CUTOFF,
    meter: str = "X",
    tolerance: float = config.DEFAULT_TOL,
) -> QndTriple:
    """Coupling ``χ X_a Y_b`` between signal ``a`` and meter ``b``, truncated.

    The free Hamiltonian vanishes in the rotating frame. ``meter`` picks the
    read-out quadrature of mode ``b``.
    """
    x, y = quadratures(cutoff)
    eye = np.eye(cutoff)
    meter_op = {"X": x, "Y": y}[meter.upper()]
    return QndTriple(
        h_free=np.zeros((cutoff**2, cutoff**2)),
        h_int=chi * kron(x, y),
        qnd_var=kron(x, eye),
        meter_var=kron(eye, meter_op),
        tolerance=tolerance,
        mask=edge_mask(cutoff),
    )


def cv_phase_triple(
    g: float = 1.0, cutoff: int = DEFAULT_CUTOFF, tolerance: float = config.DEFAULT_TOL
) -> QndTriple:
    """Continuous-variable phase estimation as a QND triple on index ⊗ target.

    Coupling ``g x_I X_T``, measured variable ``X_T``, meter ``Y_I``.
    """
    x, y = quadratures(cutoff)
    eye = np.eye(cutoff)
    return QndTriple(
        h_free=np.zeros((cutoff**2, cutoff**2)),
        h_int=g * kron(x, x),
        qnd_var=kron(eye, x),
        meter_var=kron(y, eye),
        tolerance=tolerance,
        mask=edge_mask(cutoff),
    )
