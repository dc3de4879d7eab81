"""Gaussian continuous-variable states, QND couplings and homodyne read-out.

Units: ħ = m = ω = 1, so the vacuum has quadrature variances 1/2 and the
uncertainty bound reads ΔX ΔY >= 1/2. Phase-space vectors are ordered
``(X_1, Y_1, ..., X_n, Y_n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9
SYMPLECTIC_TOL = 1e-12


class InvalidStateError(ValueError):
    pass


def symplectic_form(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _quad_index(mode: int, quadrature: str) -> int:
    q = quadrature.upper()
    if q not in ("X", "Y"):
        raise ValueError(f"quadrature must be 'X' or 'Y', got {quadrature!r}")
    return 2 * mode + (q == "Y")


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise InvalidStateError(
                f"mean of length {mean.size} and covariance of shape {cov.shape} do not describe n modes"
            )
        if mean.size:
            asym = np.max(np.abs(cov - cov.T))
            if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
                raise InvalidStateError(f"covariance is not symmetric (max asymmetry {asym:.3e})")
            cov = 0.5 * (cov + cov.T)
            n = mean.size // 2
            lowest = np.linalg.eigvalsh(cov + 0.5j * symplectic_form(n))[0]
            if lowest < -PSD_TOL * max(1.0, np.max(np.abs(cov))):
                raise InvalidStateError(
                    f"covariance violates the uncertainty relation (min eigenvalue {lowest:.3e})"
                )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def variance(self, mode: int, quadrature: str) -> float:
        i = _quad_index(mode, quadrature)
        return float(self.cov[i, i])

    def uncertainty_products(self) -> list[float]:
        """Per-mode ``ΔX ΔY``."""
        d = np.diag(self.cov)
        return [math.sqrt(d[2 * k] * d[2 * k + 1]) for k in range(self.n_modes)]

    def tensor(self, other: "GaussianState") -> "GaussianState":
        n, k = self.mean.size, other.mean.size
        cov = np.zeros((n + k, n + k))
        cov[:n, :n] = self.cov
        cov[n:, n:] = other.cov
        return GaussianState(np.concatenate([self.mean, other.mean]), cov)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
            "uncertainty_products": self.uncertainty_products(),
        }


@dataclass(frozen=True)
class HomodyneOutcome:
    value: float
    conditioned: GaussianState
    estimate: float | None = None

    def to_dict(self) -> dict:
        return {
            "outcome": self.value,
            "estimate": self.estimate,
            "conditioned_mean": self.conditioned.mean.tolist(),
            "conditioned_cov": self.conditioned.cov.tolist(),
            "uncertainty_products": self.conditioned.uncertainty_products(),
        }


def vacuum(n: int = 1) -> GaussianState:
    if n < 1:
        raise ValueError(f"need at least one mode, got {n}")
    return GaussianState(np.zeros(2 * n), 0.5 * np.eye(2 * n))


def squeezed(r: float, angle: str = "X", mean=(0.0, 0.0)) -> GaussianState:
    """Single-mode squeezed state, reduced noise in quadrature ``angle``."""
    if not math.isfinite(r):
        raise ValueError(f"squeezing must be finite, got {r}")
    lo, hi = 0.5 * math.exp(-2.0 * r), 0.5 * math.exp(2.0 * r)
    if angle.upper() == "X":
        cov = np.diag([lo, hi])
    elif angle.upper() == "Y":
        cov = np.diag([hi, lo])
    else:
        raise ValueError(f"angle must be 'X' or 'Y', got {angle!r}")
    return GaussianState(np.asarray(mean, dtype=float), cov)


def symplectic_defect(s: np.ndarray) -> float:
    n = s.shape[0] // 2
    omega = symplectic_form(n)
    return float(np.linalg.norm(s @ omega @ s.T - omega))


def apply_symplectic(state: GaussianState, s: np.ndarray) -> GaussianState:
    s = np.asarray(s, dtype=float)
    if s.shape != state.cov.shape:
        raise ValueError(f"map of shape {s.shape} on a {state.n_modes}-mode state")
    defect = symplectic_defect(s)
    if defect >= SYMPLECTIC_TOL:
        raise ValueError(f"map is not symplectic (||S Ω S^T - Ω||_F = {defect:.3e})")
    return GaussianState(s @ state.mean, s @ state.cov @ s.T)


def _check_pair(n: int, a: int, b: int) -> None:
    for k in (a, b):
        if not 0 <= k < n:
            raise IndexError(f"mode {k} out of range for {n} modes")
    if a == b:
        raise ValueError("the two coupled modes must differ")


def qnd_coupling_matrix(n: int, a: int, b: int, chi: float) -> np.ndarray:
    """Phase-space map of the ``χ X_a Y_b`` coupling.

    ``X_b -> X_b + χ X_a`` and ``Y_a -> Y_a - χ Y_b``; ``X_a`` and ``Y_b`` are
    untouched. The signs put the meter at ``χ x`` for a signal at ``x``.
    """
    _check_pair(n, a, b)
    s = np.eye(2 * n)
    s[2 * b, 2 * a] = chi
    s[2 * a + 1, 2 * b + 1] = -chi
    return s


def cv_phase_coupling_matrix(n: int, index: int, target: int, g: float) -> np.ndarray:
    """Phase-space map of ``exp(i g x_I X_T)``: ``Y_I -= g X_T``, ``Y_T -= g X_I``."""
    _check_pair(n, index, target)
    s = np.eye(2 * n)
    s[2 * index + 1, 2 * target] = -g
    s[2 * target + 1, 2 * index] = -g
    return s


def qnd_couple(state: GaussianState, a: int, b: int, chi: float) -> GaussianState:
    return apply_symplectic(state, qnd_coupling_matrix(state.n_modes, a, b, chi))


def condition_on_quadrature(
    state: GaussianState, mode: int, quadrature: str, value: float
) -> GaussianState:
    """Remaining modes given that ``quadrature`` of ``mode`` read ``value``."""
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range for {state.n_modes} modes")
    q = _quad_index(mode, quadrature)
    var_q = state.cov[q, q]
    if var_q <= 0:
        raise InvalidStateError(f"measured quadrature has variance {var_q!r}")
    keep = [i for i in range(state.mean.size) if i // 2 != mode]
    sigma_rq = state.cov[keep, q]
    mean = state.mean[keep] + sigma_rq * (value - state.mean[q]) / var_q
    cov = state.cov[np.ix_(keep, keep)] - np.outer(sigma_rq, sigma_rq) / var_q
    return GaussianState(mean, cov)


def homodyne(state: GaussianState, mode: int, quadrature: str = "X", seed=None) -> HomodyneOutcome:
    """Sample a quadrature of ``mode`` and condition the rest on the result.

    The measured mode is removed from the returned state.
    """
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range for {state.n_modes} modes")
    q = _quad_index(mode, quadrature)
    var_q = state.cov[q, q]
    if var_q <= 0:
        raise InvalidStateError(f"measured quadrature has variance {var_q!r}")
    rng = np.random.default_rng(seed)
    value = float(state.mean[q] + math.sqrt(var_q) * rng.standard_normal())
    return HomodyneOutcome(value, condition_on_quadrature(state, mode, quadrature, value))


def _single_mode(state: GaussianState, name: str) -> None:
    if state.n_modes != 1:
        raise ValueError(f"{name} must be a single-mode state, got {state.n_modes} modes")


def qnd_measure(signal: GaussianState, chi: float, r_meter: float, seed=None) -> HomodyneOutcome:
    """QND read-out of ``X`` on ``signal`` through an X-squeezed meter.

    The meter (mode 1) stands in for the ``X_b = 0`` eigenstate; after the
    coupling its ``X`` is measured and ``estimate = value / χ``.
    """
    _single_mode(signal, "signal")
    if chi == 0:
        raise ValueError("coupling strength chi must be non-zero")
    joint = qnd_couple(signal.tensor(squeezed(r_meter, "X")), 0, 1, chi)
    out = homodyne(joint, 1, "X", seed)
    return HomodyneOutcome(out.value, out.conditioned, out.value / chi)


def qnd_estimator_variance(signal: GaussianState, chi: float, r_meter: float) -> float:
    return signal.variance(0, "X") + math.exp(-2.0 * r_meter) / (2.0 * chi**2)


def cv_phase_estimate(g: float, target: GaussianState, r_index: float, seed=None) -> HomodyneOutcome:
    """Continuous-variable phase estimation of ``A_T = g X_T``.

    The index (mode 0) is Y-squeezed to approximate the zero-momentum state,
    coupled by ``exp(i g x_I X_T)``, then its momentum is read out;
    ``estimate = -value / g`` tracks the mean of ``X_T``.
    """
    _single_mode(target, "target")
    if g == 0:
        raise ValueError("coupling g must be non-zero")
    joint = squeezed(r_index, "Y").tensor(target)
    joint = apply_symplectic(joint, cv_phase_coupling_matrix(2, 0, 1, g))
    out = homodyne(joint, 0, "Y", seed)
    return HomodyneOutcome(out.value, out.conditioned, -out.value / g)


def cv_phase_estimator_variance(g: float, target: GaussianState, r_index: float) -> float:
    return target.variance(0, "X") + math.exp(-2.0 * r_index) / (2.0 * g**2)


def _batch_estimates(joint: GaussianState, q: int, divisor: float, rngs) -> np.ndarray:
    # Same draw as homodyne() per generator, without rebuilding conditioned states.
    mu, sd = joint.mean[q], math.sqrt(joint.cov[q, q])
    values = np.fromiter((mu + sd * rng.standard_normal() for rng in rngs), float)
    return values / divisor


def qnd_measure_batch(signal: GaussianState, chi: float, r_meter: float, rngs) -> np.ndarray:
    """Estimates of :func:`qnd_measure`, one per generator in ``rngs``."""
    _single_mode(signal, "signal")
    if chi == 0:
        raise ValueError("coupling strength chi must be non-zero")
    joint = qnd_couple(signal.tensor(squeezed(r_meter, "X")), 0, 1, chi)
    return _batch_estimates(joint, _quad_index(1, "X"), chi, rngs)


def cv_phase_estimate_batch(g: float, target: GaussianState, r_index: float, rngs) -> np.ndarray:
    """Estimates of :func:`cv_phase_estimate`, one per generator in ``rngs``."""
    _single_mode(target, "target")
    if g == 0:
        raise ValueError("coupling g must be non-zero")
    joint = squeezed(r_index, "Y").tensor(target)
    joint = apply_symplectic(joint, cv_phase_coupling_matrix(2, 0, 1, g))
    return _batch_estimates(joint, _quad_index(0, "Y"), -g, rngs)
