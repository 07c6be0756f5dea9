"""Dense complex linear-algebra kernel.

Thin contract-checked layer over numpy/scipy. Matrices are plain
``numpy.ndarray`` objects of dtype complex128 (``ComplexMatrix``).
"""
import logging
from typing import Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .exceptions import ContractViolationError, NotPSDError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-10
PSD_CLIP = 1e-10


def as_matrix(x) -> ComplexMatrix:
    """Coerce to a 2-D complex array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2:
        raise ContractViolationError(f"Expected a 2-D matrix, got shape {arr.shape}")
    return arr


def _require_square(x: ComplexMatrix, name: str = "matrix") -> None:
    if x.shape[0] != x.shape[1]:
        raise ContractViolationError(f"{name} must be square, got shape {x.shape}")


def hermiticity_error(x) -> float:
    """max |X - X^dagger|"""
    x = as_matrix(x)
    _require_square(x)
    return float(np.max(np.abs(x - x.conj().T))) if x.size else 0.0


def hermitize(x) -> ComplexMatrix:
    """Symmetrize away rounding noise: (X + X^dagger) / 2."""
    x = as_matrix(x)
    return 0.5 * (x + x.conj().T)


def hermitian_eig(h, atol: float = HERMITIAN_TOL) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        h: Hermitian matrix (checked to ``atol`` in max norm)
        atol: Hermiticity tolerance

    Returns:
        (eigenvalues ascending, unitary matrix of eigenvectors as columns)

    Raises:
        ContractViolationError: non-square or non-Hermitian input
    """
    h = as_matrix(h)
    _require_square(h)
    err = hermiticity_error(h)
    if err >= atol:
        raise ContractViolationError(f"Matrix is not Hermitian (max |H - H^dagger| = {err:.3e})")
    return np.linalg.eigh(hermitize(h))


def _from_spectrum(values: np.ndarray, vectors: ComplexMatrix) -> ComplexMatrix:
    return (vectors * values) @ vectors.conj().T


def psd_sqrt(p, clip: float = PSD_CLIP) -> ComplexMatrix:
    """
    Principal square root of a PSD matrix via its eigendecomposition.

    Eigenvalues in [-clip, 0) are treated as rounding noise and set to zero.

    Raises:
        NotPSDError: an eigenvalue lies below -clip
    """
    w, v = hermitian_eig(p)
    if w.size and w[0] < -clip:
        raise NotPSDError(float(w[0]))
    return _from_spectrum(np.sqrt(np.clip(w, 0.0, None)), v)


def psd_inverse(p, floor: float = 0.0) -> ComplexMatrix:
    """
    Inverse of a PSD matrix with eigenvalues floored at ``floor``.

    With ``floor == 0`` the matrix must be strictly positive definite.

    Raises:
        NotPSDError: an eigenvalue lies below -PSD_CLIP
        ContractViolationError: singular input and no floor
    """
    w, v = hermitian_eig(p)
    if w.size and w[0] < -PSD_CLIP:
        raise NotPSDError(float(w[0]))
    if floor > 0:
        w = np.maximum(w, floor)
    elif w.size and w[0] <= 0:
        raise ContractViolationError("Cannot invert a singular matrix without a floor")
    return _from_spectrum(1.0 / w, v)


def matrix_exp(x) -> ComplexMatrix:
    """
    Matrix exponential.

    Hermitian and anti-Hermitian inputs go through the eigendecomposition so
    the result is exactly Hermitian / unitary up to rounding; anything else
    falls back to scipy's scaling-and-squaring.
    """
    x = as_matrix(x)
    _require_square(x)
    if x.size == 0:
        return x.copy()
    scale = max(1.0, float(np.max(np.abs(x))))
    if float(np.max(np.abs(x + x.conj().T))) < 1e-12 * scale:
        # exp(X) = exp(-iH) with H = iX Hermitian
        w, v = np.linalg.eigh(hermitize(1j * x))
        return _from_spectrum(np.exp(-1j * w), v)
    if float(np.max(np.abs(x - x.conj().T))) < 1e-12 * scale:
        w, v = np.linalg.eigh(hermitize(x))
        return _from_spectrum(np.exp(w).astype(np.complex128), v)
    logger.debug(f"matrix_exp: non-normal {x.shape[0]}x{x.shape[0]} input, using scipy expm")
    return scipy.linalg.expm(x)


def kron(a, b) -> ComplexMatrix:
    """Tensor product; entry (i*rB + k, j*cB + l) equals A[i, j] * B[k, l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(x, dims: Tuple[int, int], keep: int) -> ComplexMatrix:
    """
    Partial trace of an operator on a d1 (x) d2 space.

    Args:
        x: square matrix of dimension d1*d2
        dims: (d1, d2)
        keep: 0 keeps the first factor (traces out the second), 1 keeps the second

    Raises:
        ContractViolationError: dimension mismatch or bad factor index
    """
    x = as_matrix(x)
    _require_square(x)
    d1, d2 = dims
    if d1 * d2 != x.shape[0]:
        raise ContractViolationError(
            f"Dimension {x.shape[0]} does not factor as {d1} x {d2}"
        )
    t = x.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ikjk->ij", t)
    if keep == 1:
        return np.einsum("kikj->ij", t)
    raise ContractViolationError(f"Factor index must be 0 or 1, got {keep}")


def max_abs(x) -> float:
    """Max-norm of a matrix or vector."""
    arr = np.asarray(x)
    return float(np.max(np.abs(arr))) if arr.size else 0.0
