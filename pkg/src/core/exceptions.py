"""Error hierarchy for the cloning toolkit."""
from typing import Optional


class ClonerError(Exception):
    """Base class for every error raised by src.core."""


class ContractViolationError(ClonerError):
    """Input violates a shape, Hermiticity or normalization contract."""


class NotPSDError(ClonerError):
    """Matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, min_eigenvalue: float):
        super().__init__(f"Matrix is not PSD (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class SizeError(ClonerError):
    """Clone count or qubit count outside the supported range."""


class DomainError(ClonerError):
    """Parameter outside its mathematical domain."""


class RegularizationError(ClonerError):
    """Lagrange multiplier matrix is singular and cannot be inverted."""


class CertificateInvalidError(ClonerError):
    """Dual certificate fails its PSD check."""

    def __init__(self, M: int, min_eigenvalue: float):
        super().__init__(
            f"Dual certificate for M={M} is not PSD (min eigenvalue {min_eigenvalue:.3e})"
        )
        self.M = M
        self.min_eigenvalue = min_eigenvalue


class NonConvergenceError(ClonerError):
    """Fixed-point iteration hit max_iter before converging.

    Carries the last iterate so callers can still report it.
    """

    def __init__(self, iterations: int, fidelity: float, last_choi: Optional[object] = None):
        super().__init__(
            f"No convergence after {iterations} iterations (last fidelity {fidelity:.15g})"
        )
        self.iterations = iterations
        self.fidelity = fidelity
        self.last_choi = last_choi


class InsufficientCutoffError(ClonerError):
    """Fock-space truncation too small for the requested accuracy."""

    def __init__(self, cutoff: int, tail: float, tail_tol: float):
        super().__init__(
            f"Cutoff {cutoff} insufficient: tail estimate {tail:.3e} exceeds {tail_tol:.1e}"
        )
        self.cutoff = cutoff
        self.tail = tail
        self.tail_tol = tail_tol
