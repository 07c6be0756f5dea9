"""Stimulated parametric down-conversion as a probabilistic cloner.

Modes V1, H1 (signal) and V2, H2 (idler); hbar = 1 and the only physical
parameter is gamma = g t. The input |1>_V1 |0>_H1 |0>_V2 |1>_H2 stands for
|psi, psi_perp> = |01>.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from .exceptions import DomainError, InsufficientCutoffError
from .matcore import matrix_exp
from .settings import DEFAULT_ORACLE, OracleSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GainParameter:
    """
    gamma = g t, Gamma = tanh(gamma), y = sinh^2(gamma) = Gamma^2 / (1 - Gamma^2).

    one_minus_G2 = 1 - Gamma^2 = 1 / (1 + y) is stored, never recomputed from
    Gamma, which rounds to 1 for large y.
    """

    gamma: float
    Gamma: float
    y: float
    one_minus_G2: float

    def __post_init__(self):
        if self.gamma < 0:
            raise DomainError(f"gamma={self.gamma} must be non-negative")
        if not (0.0 <= self.Gamma <= 1.0):
            raise DomainError(f"Gamma={self.Gamma} outside [0, 1]")
        if not (0.0 < self.one_minus_G2 <= 1.0):
            raise DomainError(f"1 - Gamma^2 = {self.one_minus_G2} outside (0, 1]")
        if self.y < 0:
            raise DomainError(f"y={self.y} must be non-negative")

    @property
    def Gamma2(self) -> float:
        return self.y * self.one_minus_G2

    @classmethod
    def from_gamma(cls, gamma: float) -> "GainParameter":
        if gamma < 0:
            raise DomainError(f"gamma={gamma} must be non-negative")
        return cls(
            gamma=gamma,
            Gamma=math.tanh(gamma),
            y=math.sinh(gamma) ** 2,
            one_minus_G2=1.0 / math.cosh(gamma) ** 2,
        )

    @classmethod
    def from_Gamma(cls, Gamma: float) -> "GainParameter":
        if not (0.0 <= Gamma < 1.0):
            raise DomainError(f"Gamma={Gamma} outside [0, 1)")
        one_minus = (1.0 - Gamma) * (1.0 + Gamma)
        return cls(gamma=math.atanh(Gamma), Gamma=Gamma, y=Gamma ** 2 / one_minus, one_minus_G2=one_minus)

    @classmethod
    def from_y(cls, y: float) -> "GainParameter":
        if y < 0:
            raise DomainError(f"y={y} must be non-negative")
        one_minus = 1.0 / (1.0 + y)
        return cls(gamma=math.asinh(math.sqrt(y)), Gamma=math.sqrt(y * one_minus), y=y, one_minus_G2=one_minus)


@dataclass(frozen=True)
class PdcBlock:
    """Post-selected M-photon block: normalized amplitudes over j = 0..M."""

    M: int
    gain: GainParameter
    amplitudes: np.ndarray
    success_prob: float


@dataclass(frozen=True)
class GainScanRow:
    """One grid point of a gain scan."""

    y: float
    fidelity: float
    success_prob: float


def pdc_raw_block(gain: GainParameter, M: int) -> np.ndarray:
    """
    Unnormalized amplitudes of |M-j>_V1 |j>_H1 |j>_V2 |M-j>_H2, j = 0..M:

        Gamma^{M-1} (1 - Gamma^2) (-1)^j [(M-j)(1 - Gamma^2) - Gamma^2]
    """
    if M < 0:
        raise DomainError(f"M={M} must be non-negative")
    g2, rest = gain.Gamma2, gain.one_minus_G2
    if M == 0:
        # Gamma^{-1} * (-Gamma^2)
        return np.array([-gain.Gamma * rest])
    j = np.arange(M + 1)
    bracket = (-1.0) ** j * ((M - j) * rest - g2)
    return gain.Gamma ** (M - 1) * rest * bracket


def pdc_amplitudes(gain: GainParameter, M: int) -> PdcBlock:
    """
    Normalized M-photon block after detecting M photons in mode 2.

    Sign fixed so the first nonzero amplitude is positive.
    """
    if M < 1:
        raise DomainError(f"M={M} must be at least 1")
    g2, rest = gain.Gamma2, gain.one_minus_G2
    j = np.arange(M + 1)
    bracket = (-1.0) ** j * ((M - j) * rest - g2)
    norm = float(np.linalg.norm(bracket))
    amplitudes = bracket / norm
    lead = amplitudes[np.flatnonzero(np.abs(amplitudes) > 1e-15)[0]]
    if lead < 0:
        amplitudes = -amplitudes
    success = g2 ** (M - 1) * rest ** 2 * norm ** 2
    return PdcBlock(M=M, gain=gain, amplitudes=amplitudes, success_prob=float(success))


def pdc_total_weight(gain: GainParameter, m_max: int) -> float:
    """Sum of squared block norms for M = 0..m_max (tends to 1)."""
    return float(sum(np.sum(pdc_raw_block(gain, M) ** 2) for M in range(m_max + 1)))


def pdc_fidelity(M: int, y: float) -> float:
    """Single-clone fidelity of the normalized M-photon block at gain y."""
    if y < 0:
        raise DomainError(f"y={y} must be non-negative")
    if M < 1:
        raise DomainError(f"M={M} must be at least 1")
    num = 3 * y * y - 2 * y * (2 * M + 1) + 1.5 * M * (M + 1)
    den = 6 * y * y - 6 * M * y + M * (2 * M + 1)
    return num / den


def optimal_gain(M: int) -> float:
    """y_opt = M/2 - sqrt(M(M+2)/3)/2"""
    if M < 1:
        raise DomainError(f"M={M} must be at least 1")
    return max(0.0, M / 2.0 - 0.5 * math.sqrt(M * (M + 2) / 3.0))


def optimal_gamma(M: int) -> float:
    """Interaction strength gamma realizing y_opt."""
    return math.asinh(math.sqrt(optimal_gain(M)))


def gain_scan(M: int, y_grid: Iterable[float]) -> List[GainScanRow]:
    """Fidelity and post-selection probability at each gain value."""
    ys = [float(y) for y in y_grid]
    if not ys:
        raise DomainError("Gain grid is empty")
    rows = []
    for y in ys:
        block = pdc_amplitudes(GainParameter.from_y(y), M)
        rows.append(GainScanRow(y=y, fidelity=pdc_fidelity(M, y), success_prob=block.success_prob))
    return rows


def best_row(rows: List[GainScanRow]) -> GainScanRow:
    return max(rows, key=lambda r: r.fidelity)


# ---------------------------------------------------------------------------
# Fock-space oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FockState4:
    """
    Evolved state on occupations (n_V1, n_H1, n_V2, n_H2), each <= cutoff.

    Only the reachable tuples (p, q, q, p) are stored.
    """

    cutoff: int
    occupations: np.ndarray
    amplitudes: np.ndarray
    tail_estimate: float
    working_cutoff: int
    working_norm: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def norm_deficit(self) -> float:
        """Weight carried beyond the cutoff."""
        return 1.0 - self.norm ** 2

    def amplitude(self, n_v1: int, n_h1: int, n_v2: int, n_h2: int) -> complex:
        if n_v1 != n_h2 or n_h1 != n_v2 or max(n_v1, n_h1) > self.cutoff:
            return 0.0 + 0.0j
        return complex(self.amplitudes[n_v1 * (self.cutoff + 1) + n_h1])

    def block(self, M: int) -> np.ndarray:
        """Amplitudes of |M-j, j, j, M-j>, j = 0..M."""
        if M > self.cutoff:
            raise DomainError(f"Block M={M} exceeds cutoff {self.cutoff}")
        return np.array([self.amplitude(M - j, j, j, M - j) for j in range(M + 1)])


def _pair_generator(size: int) -> np.ndarray:
    """
    X - X^dagger on pair occupations (p, q) <= size - 1, with
    X = a+_V1 a+_H2 - a+_H1 a+_V2; index p*size + q.
    """
    x = np.zeros((size * size, size * size))
    for p in range(size):
        for q in range(size):
            src = p * size + q
            if p + 1 < size:
                x[(p + 1) * size + q, src] += p + 1
            if q + 1 < size:
                x[p * size + q + 1, src] -= q + 1
    return x - x.T


def _evolve(gamma: float, size: int) -> np.ndarray:
    """Truncated propagator exp(gamma (X - X^dagger)) applied to |p=1, q=0>."""
    u = matrix_exp(gamma * _pair_generator(size))
    return u[:, 1 * size + 0]


def _box(state: np.ndarray, size: int, cutoff: int) -> np.ndarray:
    return state.reshape(size, size)[: cutoff + 1, : cutoff + 1].reshape(-1)


def fock_oracle(gamma: float, cutoff: int, settings: OracleSettings = DEFAULT_ORACLE) -> FockState4:
    """
    Evolve the single-pair input under H = i g (a+_V1 a+_H2 - a+_H1 a+_V2) + h.c.
    by a matrix exponential on a truncated Fock space.

    The Hamiltonian only creates V1-H2 and H1-V2 pairs, so the propagator
    lives on tuples (p, q, q, p). It is built with p, q <= cutoff + margin;
    the margin grows until the amplitudes inside the cutoff box move by less
    than ``settings.tail_tol``.

    Raises:
        DomainError: gamma < 0 or cutoff < 2
        InsufficientCutoffError: no margin up to max_margin reaches tail_tol
    """
    if gamma < 0:
        raise DomainError(f"gamma={gamma} must be non-negative")
    if cutoff < 2:
        raise DomainError(f"cutoff={cutoff} must be at least 2")

    margin = settings.margin
    size = cutoff + margin + 1
    previous = _box(_evolve(gamma, size), size, cutoff)
    tail = math.inf
    while True:
        margin += settings.margin_step
        if margin > settings.max_margin:
            raise InsufficientCutoffError(cutoff, tail, settings.tail_tol)
        size = cutoff + margin + 1
        state = _evolve(gamma, size)
        current = _box(state, size, cutoff)
        tail = float(np.linalg.norm(current - previous))
        logger.debug(f"fock_oracle gamma={gamma}: working cutoff {size - 1}, tail estimate {tail:.3e}")
        if tail < settings.tail_tol:
            break
        previous = current

    working_norm = float(np.linalg.norm(state))
    unitarity = abs(working_norm - 1.0)
    if unitarity > 1e-9:
        logger.warning(f"fock_oracle: truncated propagator norm error {unitarity:.3e}")
    p, q = np.divmod(np.arange((cutoff + 1) ** 2), cutoff + 1)
    occupations = np.column_stack([p, q, q, p])
    return FockState4(
        cutoff=cutoff,
        occupations=occupations,
        amplitudes=current.astype(np.complex128),
        tail_estimate=tail,
        working_cutoff=size - 1,
        working_norm=working_norm,
    )


def align_phase(reference: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Multiply ``other`` by the global phase that best matches ``reference``."""
    overlap = np.vdot(other, reference)
    if abs(overlap) == 0:
        return other
    return other * (overlap / abs(overlap))


def oracle_block_error(gamma: float, cutoff: int, m_max: Optional[int] = None) -> float:
    """
    Largest deviation between oracle blocks and the closed-form amplitudes,
    for M = 0..m_max after aligning one global phase over all blocks.
    """
    m_max = cutoff - 1 if m_max is None else m_max
    state = fock_oracle(gamma, cutoff)
    gain = GainParameter.from_gamma(gamma)
    oracle = np.concatenate([state.block(M) for M in range(m_max + 1)])
    closed = np.concatenate([pdc_raw_block(gain, M) for M in range(m_max + 1)])
    return float(np.max(np.abs(align_phase(closed, oracle) - closed)))
