"""Process-wide numerical defaults."""

import os

#: Frobenius tolerance used by predicates and the QND criteria checks.
DEFAULT_TOL = 1e-10

#: Default cap on index + target qubits held in one state vector.
DEFAULT_MAX_QUBITS = 14

#: Seed used by the CLI when ``--seed`` is not given.
DEFAULT_SEED = 20020327

MAX_QUBITS_ENV = "QNDPHASE_MAX_QUBITS"


def max_qubits() -> int:
    """Register cap, overridable through ``QNDPHASE_MAX_QUBITS``."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_QUBITS
    value = int(raw)
    if value < 1:
        raise ValueError(f"{MAX_QUBITS_ENV} must be a positive integer, got {raw!r}")
    return value


def max_dim() -> int:
    return 2 ** max_qubits()
