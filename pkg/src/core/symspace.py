"""Symmetric (Dicke) subspace of M qubits."""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ContractViolationError, SizeError
from .matcore import ComplexMatrix
from .su2kit import MAX_SYMMETRIC_QUBITS, BlochAngles, _zero_counts, spin_flip, wigner_bigD

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class DickeLabel:
    """|M,k>: M qubits, k of them in |0>."""

    M: int
    k: int

    def __post_init__(self):
        if self.M < 1:
            raise SizeError(f"M={self.M} must be at least 1")
        if not (0 <= self.k <= self.M):
            raise ContractViolationError(f"k={self.k} outside 0..{self.M}")


@dataclass(frozen=True)
class SymVector:
    """Coefficients of a symmetric M-qubit state over |M,0>..|M,M>."""

    M: int
    coeffs: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def dicke_vector(label: DickeLabel) -> np.ndarray:
    """
    Amplitudes of |M,k> in the 2^M computational basis.

    Equal weight 1/sqrt(C(M,k)) on every bit string with k zeros.

    Raises:
        SizeError: M above 20
    """
    if label.M > MAX_SYMMETRIC_QUBITS:
        raise SizeError(f"M={label.M} exceeds {MAX_SYMMETRIC_QUBITS} qubits")
    mask = _zero_counts(label.M) == label.k
    return mask / math.sqrt(math.comb(label.M, label.k))


def sym_product_state(M: int, j: int, angles: BlochAngles) -> SymVector:
    """|j psi, (M-j) psi_perp> with coefficients e^{i(j-k)phi} D^M_kj(theta)."""
    if not (0 <= j <= M):
        raise ContractViolationError(f"j={j} outside 0..{M}")
    column = wigner_bigD(M, angles.theta).entries[:, j]
    k = np.arange(M + 1)
    return SymVector(M=M, coeffs=np.exp(1j * (j - k) * angles.phi) * column)


def reduced_qubit(M: int, k: int, kp: int) -> ComplexMatrix:
    """
    Single-qubit operator Tr_{all but one}[|M,k><M,k'|].

    Raises:
        ContractViolationError: index outside 0..M
    """
    if not (0 <= k <= M and 0 <= kp <= M):
        raise ContractViolationError(f"Indices (k={k}, k'={kp}) outside 0..{M}")
    out = np.zeros((2, 2), dtype=np.complex128)
    if k == kp:
        out[0, 0] = k / M
        out[1, 1] = (M - k) / M
    elif kp == k - 1:
        out[0, 1] = math.sqrt(k * (M - k + 1)) / M
    elif kp == k + 1:
        out[1, 0] = math.sqrt((k + 1) * (M - k)) / M
    return out


@lru_cache(maxsize=64)
def reduced_qubit_table(M: int) -> np.ndarray:
    """All reduced_qubit blocks as an array indexed [k, k', n', n]."""
    table = np.zeros((M + 1, M + 1, 2, 2), dtype=np.complex128)
    for k in range(M + 1):
        for kp in range(max(0, k - 1), min(M, k + 1) + 1):
            table[k, kp] = reduced_qubit(M, k, kp)
    table.setflags(write=False)
    return table


def single_qubit_state(rho) -> ComplexMatrix:
    """Marginal of one qubit for an operator on the symmetric subspace."""
    rho = np.asarray(rho, dtype=np.complex128)
    M = rho.shape[0] - 1
    return np.einsum("kl,klab->ab", rho, reduced_qubit_table(M))


def collective_flip(M: int) -> np.ndarray:
    """
    spin_flip() applied to every qubit, restricted to the Dicke basis.

    Each |0> picks up U0[1, 0] and each |1> picks up U0[0, 1], so
    |M,k> -> U0[1,0]^k U0[0,1]^{M-k} |M,M-k> = (-1)^{M-k} |M,M-k>.
    """
    u0 = spin_flip().real
    flip = np.zeros((M + 1, M + 1))
    for k in range(M + 1):
        flip[M - k, k] = u0[1, 0] ** k * u0[0, 1] ** (M - k)
    return flip


def clone_fidelity_series(alpha) -> float:
    """
    sum_j ((M-j)/M) alpha_j^2 for a unit-norm coefficient vector.

    Accepts a CloneCoefficients instance or a bare sequence alpha_0..alpha_M.

    Raises:
        ContractViolationError: coefficients not normalized
    """
    a = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    norm = float(np.sum(a ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise ContractViolationError(f"Coefficients not normalized (sum of squares {norm:.12g})")
    M = a.size - 1
    weights = (M - np.arange(M + 1)) / M
    return float(np.sum(weights * a ** 2))
