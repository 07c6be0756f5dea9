"""SU(2) / Bloch-sphere utilities.

Conventions:
    |psi>      = d(Omega)|0> = cos(t/2)|0> + e^{i phi} sin(t/2)|1>
    |psi_perp> = d(Omega)|1> = e^{-i phi} sin(t/2)|0> - cos(t/2)|1>
    Dicke index k counts qubits in |0>; symmetric-product index j counts
    copies of |psi>.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exceptions import ContractViolationError, DomainError, SizeError
from .matcore import ComplexMatrix

logger = logging.getLogger(__name__)

MAX_SYMMETRIC_QUBITS = 20
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BlochAngles:
    """Polar angle theta in [0, pi], azimuth phi in [0, 2 pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta={self.theta} outside [0, pi]; use BlochAngles.normalized")
        if not (0.0 <= self.phi < TWO_PI):
            raise DomainError(f"phi={self.phi} outside [0, 2pi); use BlochAngles.normalized")

    @classmethod
    def normalized(cls, theta: float, phi: float = 0.0) -> "BlochAngles":
        """Fold arbitrary angles onto the canonical ranges (same point on the sphere)."""
        theta = math.fmod(theta, TWO_PI)
        if theta < 0:
            theta += TWO_PI
        if theta > math.pi:
            theta = TWO_PI - theta
            phi += math.pi
        phi = math.fmod(phi, TWO_PI)
        if phi < 0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        return cls(theta=min(theta, math.pi), phi=phi)


def random_bloch(rng: np.random.Generator) -> BlochAngles:
    """Haar-uniform point: cos(theta) uniform on [-1, 1], phi uniform."""
    cos_t = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, TWO_PI)
    return BlochAngles.normalized(math.acos(cos_t), phi)


def bloch_matrix(angles: BlochAngles) -> ComplexMatrix:
    """d(Omega); column 0 is |psi>, column 1 is |psi_perp>."""
    c = math.cos(angles.theta / 2)
    s = math.sin(angles.theta / 2)
    e = np.exp(1j * angles.phi)
    return np.array([[c, s / e], [e * s, -c]], dtype=np.complex128)


def qubit_pair(angles: BlochAngles):
    """(|psi>, |psi_perp>) as length-2 vectors."""
    d = bloch_matrix(angles)
    return d[:, 0].copy(), d[:, 1].copy()


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def haar_monomial(p: int, q: int, m: int) -> float:
    """
    Normalized Haar integral of cos^{2p}(t/2) sin^{2q}(t/2) e^{i m phi}.

    Equals delta_{m,0} * p! q! / (p+q+1)!, formed exactly before the float
    conversion.
    """
    if p < 0 or q < 0:
        raise DomainError(f"Exponents must be non-negative, got p={p}, q={q}")
    if m != 0:
        return 0.0
    return float(Fraction(_factorial(p) * _factorial(q), _factorial(p + q + 1)))


def _zero_counts(n_qubits: int) -> np.ndarray:
    """Number of |0> factors in each computational basis string (MSB = first qubit)."""
    idx = np.arange(2 ** n_qubits)
    ones = np.zeros(2 ** n_qubits, dtype=np.int64)
    for bit in range(n_qubits):
        ones += (idx >> bit) & 1
    return n_qubits - ones


def _check_qubits(M: int) -> None:
    if not (1 <= M <= MAX_SYMMETRIC_QUBITS):
        raise SizeError(f"M={M} outside supported range 1..{MAX_SYMMETRIC_QUBITS}")


def symmetric_product_coefficients(first, second, j: int, M: int) -> np.ndarray:
    """
    Dicke-basis coefficients of the normalized symmetric state holding j
    copies of ``first`` and M - j copies of ``second``.

    ``first`` and ``second`` must be orthonormal single-qubit vectors. The
    product state is built explicitly in the 2^M tensor basis; its overlap
    with |M,k> is scaled by sqrt(C(M,j)) (all placements contribute equally).
    """
    _check_qubits(M)
    if not (0 <= j <= M):
        raise ContractViolationError(f"j={j} outside 0..{M}")
    first = np.asarray(first, dtype=np.complex128)
    second = np.asarray(second, dtype=np.complex128)
    if abs(np.vdot(first, second)) > 1e-12:
        raise ContractViolationError("Single-qubit factors must be orthogonal")
    state = np.ones(1, dtype=np.complex128)
    for factor in [first] * j + [second] * (M - j):
        state = np.kron(state, factor)
    zeros = _zero_counts(M)
    sums = np.bincount(zeros, weights=state.real, minlength=M + 1) + 1j * np.bincount(
        zeros, weights=state.imag, minlength=M + 1
    )
    binom = np.array([math.comb(M, k) for k in range(M + 1)], dtype=float)
    return math.sqrt(math.comb(M, j)) * sums / np.sqrt(binom)


@dataclass(frozen=True)
class WignerD:
    """Real orthogonal (M+1)x(M+1) matrix D^M_{kj}(theta); row k, column j."""

    M: int
    theta: float
    entries: np.ndarray

    def orthogonality_error(self) -> float:
        gram = self.entries @ self.entries.T
        return float(np.max(np.abs(gram - np.eye(self.M + 1))))


def wigner_bigD(M: int, theta: float) -> WignerD:
    """
    D^M_{kj}(theta) at phi = 0, column j = coefficients of |j psi, (M-j) psi_perp>.

    Raises:
        SizeError: M outside 1..20
    """
    _check_qubits(M)
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    psi = np.array([c, s])
    perp = np.array([s, -c])
    cols = [symmetric_product_coefficients(psi, perp, j, M).real for j in range(M + 1)]
    return WignerD(M=M, theta=theta, entries=np.column_stack(cols))


def recurrence_residual(D: WignerD, k: int, j: int) -> float:
    """
    |LHS - RHS| of the three-term recurrence of D^M_{kj} in k:

        (2j-M) D_kj = (2k-M) cos(t) D_kj + sin(t) sqrt((k+1)(M-k)) D_{k+1,j}
                      + sin(t) sqrt(k(M-k+1)) D_{k-1,j}

    Out-of-range entries count as zero.
    """
    M = D.M
    if not (0 <= k <= M and 0 <= j <= M):
        raise ContractViolationError(f"Index (k={k}, j={j}) outside 0..{M}")
    e = D.entries
    up = e[k + 1, j] if k + 1 <= M else 0.0
    down = e[k - 1, j] if k >= 1 else 0.0
    ct, st = math.cos(D.theta), math.sin(D.theta)
    lhs = (2 * j - M) * e[k, j]
    rhs = (
        (2 * k - M) * ct * e[k, j]
        + st * math.sqrt((k + 1) * (M - k)) * up
        + st * math.sqrt(k * (M - k + 1)) * down
    )
    return float(abs(lhs - rhs))


def spin_flip() -> ComplexMatrix:
    """U0: |0> -> |1>, |1> -> -|0>."""
    return np.array([[0, -1], [1, 0]], dtype=np.complex128)
