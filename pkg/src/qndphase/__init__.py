"""Phase estimation viewed as a quantum nondemolition measurement.

Exact state-vector phase estimation, numerical checks of the QND criteria,
and a Gaussian covariance-matrix engine for quadrature QND measurement and
continuous-variable phase estimation.
"""

from .gaussian import GaussianState, HomodyneOutcome, homodyne, qnd_couple, qnd_measure, squeezed, vacuum
from .linalg import commutator, frobenius_norm, hermitian_eig, hermitian_expi, kron
from .problem import ParseDiagnostic, ProblemError, QpeProblem, parse
from .qnd import QndReport, QndTriple, check, qpe_triple, quadrature_triple
from .qpe import QpeResult, QuantumState, exact_distribution, run_qpe, run_qpe_via_hamiltonian
from .registers import basis_state, gamma_operator, lambda_operator, qft_matrix

__version__ = "0.1.0"
