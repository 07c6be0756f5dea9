"""Optimal cloning of an orthogonal qubit pair |psi, psi_perp>.

Operators act on H (x) K: H is the two-qubit input space in the order
|00>, |11>, |01>, |10>; K is the (M+1)-dimensional symmetric subspace of the
M clones, indexed by the number k of qubits in |0>. Flattened index is
h*(M+1) + k.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import (
    CertificateInvalidError,
    ContractViolationError,
    DomainError,
    NonConvergenceError,
    RegularizationError,
    SizeError,
)
from .matcore import (
    ComplexMatrix,
    hermitian_eig,
    hermitize,
    hermiticity_error,
    kron,
    max_abs,
    partial_trace,
    psd_inverse,
    psd_sqrt,
)
from .settings import DEFAULT_OPTIMIZER, OptimizerSettings
from .su2kit import BlochAngles, haar_monomial, qubit_pair
from .symspace import (
    collective_flip,
    reduced_qubit_table,
    single_qubit_state,
    sym_product_state,
)

logger = logging.getLogger(__name__)

H_BASIS: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 1), (0, 1), (1, 0))
H_LABELS = ("00", "11", "01", "10")
MAX_CLONES = 30
PSD_TOL = 1e-10
EIGEN_CLUSTER_TOL = 1e-7
EQUALITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FidelityOperator:
    """A such that the mean single-clone fidelity is Tr[chi A]."""

    M: int
    matrix: ComplexMatrix


@dataclass(frozen=True)
class ChoiOperator:
    """chi on H (x) K; trace preservation reads Tr_K[chi] = 1_H."""

    M: int
    matrix: ComplexMatrix

    def trace_preservation_error(self) -> float:
        reduced = partial_trace(self.matrix, (4, self.M + 1), keep=0)
        return max_abs(reduced - np.eye(4))

    def min_eigenvalue(self) -> float:
        return float(hermitian_eig(self.matrix, atol=1e-8)[0][0])


@dataclass(frozen=True)
class DualCertificate:
    """Lagrange multiplier lambda and the distinct eigenvalues of lambda (x) 1_K - A."""

    M: int
    lam: ComplexMatrix
    mu: Tuple[float, ...]
    min_eigenvalue: float

    @property
    def trace(self) -> float:
        return float(np.trace(self.lam).real)

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue >= -1e-9


@dataclass(frozen=True)
class CloneCoefficients:
    """alpha_j = (-1)^j (aM + bM (M - 2j))."""

    M: int
    alpha: np.ndarray
    aM: float
    bM: float


@dataclass(frozen=True)
class CloningIsometry:
    """(M+1)^2 x 4 isometry from H into K (x) K' (clones, spin-flipped anticlones)."""

    M: int
    matrix: ComplexMatrix

    def isometry_error(self) -> float:
        return max_abs(self.matrix.conj().T @ self.matrix - np.eye(4))


@dataclass
class OptimizationResult:
    """Outcome of the Choi fixed-point iteration."""

    choi: ChoiOperator
    certificate: DualCertificate
    fidelity: float
    iterations: int
    extremal_residual: float
    history: List[float] = field(default_factory=list)

    @property
    def duality_gap(self) -> float:
        return self.certificate.trace - self.fidelity


@dataclass(frozen=True)
class CrossoverResult:
    """Smallest M where the orthogonal-pair cloner strictly wins, plus any tie."""

    N: int
    m_max: int
    strict_m: Optional[int]
    equality_m: Optional[int]
    rows: Tuple[Tuple[int, float, float], ...]

    @property
    def found(self) -> bool:
        return self.strict_m is not None


# ---------------------------------------------------------------------------
# Fidelity operator
# ---------------------------------------------------------------------------

# d(Omega) entries as (sign, power of cos(t/2), power of sin(t/2), phase winding)
_D_MONOMIALS = {
    (0, 0): (1, 1, 0, 0),
    (0, 1): (1, 0, 1, -1),
    (1, 0): (1, 0, 1, 1),
    (1, 1): (-1, 1, 0, 0),
}


def _conj(mono):
    sign, pc, ps, m = mono
    return sign, pc, ps, -m


def _haar_product(monos) -> float:
    """Integrate a product of d-matrix monomials over the normalized Haar measure."""
    sign, pc, ps, m = 1, 0, 0, 0
    for s, a, b, w in monos:
        sign *= s
        pc += a
        ps += b
        m += w
    if m != 0:
        return 0.0
    # zero winding forces an even number of sin factors, hence even powers
    return sign * haar_monomial(pc // 2, ps // 2, 0)


def _check_clones(M: int) -> None:
    if not (1 <= M <= MAX_CLONES):
        raise SizeError(f"M={M} outside supported range 1..{MAX_CLONES}")


def build_A(M: int) -> FidelityOperator:
    """
    Fidelity operator A on H (x) K by exact Haar-moment integration.

    A[(h,k),(h',k')] = sum_{n,n'} <n'|Tr_1[|M,k><M,k'|]|n>
                       * int d_{i0} d_{j1} d*_{i'0} d*_{j'1} d_{n0} d*_{n'0}

    Raises:
        SizeError: M outside 1..30
    """
    _check_clones(M)
    moments = np.zeros((4, 4, 2, 2))
    for (h, (i, j)), (hp, (ip, jp)) in itertools.product(enumerate(H_BASIS), repeat=2):
        for n, n_p in itertools.product(range(2), repeat=2):
            moments[h, hp, n, n_p] = _haar_product((
                _D_MONOMIALS[(i, 0)],
                _D_MONOMIALS[(j, 1)],
                _conj(_D_MONOMIALS[(ip, 0)]),
                _conj(_D_MONOMIALS[(jp, 1)]),
                _D_MONOMIALS[(n, 0)],
                _conj(_D_MONOMIALS[(n_p, 0)]),
            ))
    red = reduced_qubit_table(M)
    dim = 4 * (M + 1)
    a = np.einsum("hgab,klba->hkgl", moments, red).reshape(dim, dim)
    err = hermiticity_error(a)
    if err > 1e-12:
        raise ContractViolationError(f"Fidelity operator not Hermitian (error {err:.3e})")
    w, _ = hermitian_eig(a)
    if w[0] < -PSD_TOL:
        raise ContractViolationError(f"Fidelity operator not PSD (min eigenvalue {w[0]:.3e})")
    logger.debug(f"build_A: M={M}, dim={dim}, spectrum [{w[0]:.3e}, {w[-1]:.3e}]")
    return FidelityOperator(M=M, matrix=hermitize(a))


def choi_fidelity(chi: ChoiOperator, A: FidelityOperator) -> float:
    """Tr[chi A]"""
    return float(np.trace(chi.matrix @ A.matrix).real)


def _distinct(values: np.ndarray, tol: float = EIGEN_CLUSTER_TOL) -> Tuple[float, ...]:
    out: List[List[float]] = []
    for v in np.sort(values):
        if out and abs(v - out[-1][-1]) < tol:
            out[-1].append(float(v))
        else:
            out.append([float(v)])
    return tuple(float(np.mean(group)) for group in out)


def _certificate_from_lambda(M: int, lam: ComplexMatrix, A: FidelityOperator) -> DualCertificate:
    gap = kron(lam, np.eye(M + 1)) - A.matrix
    w, _ = hermitian_eig(hermitize(gap), atol=1e-8)
    return DualCertificate(M=M, lam=lam, mu=_distinct(w), min_eigenvalue=float(w[0]))


# ---------------------------------------------------------------------------
# Fixed-point optimizer
# ---------------------------------------------------------------------------

def _lambda_pair(S: ComplexMatrix, floor: float) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """lambda = S^{1/2} and lambda^{-1}, eigenvalues of S floored at ``floor``."""
    S = hermitize(S)
    scale = float(np.trace(S).real)
    if scale <= floor:
        raise RegularizationError(f"Tr_K[A chi A] is numerically zero (trace {scale:.3e})")
    lam = psd_sqrt(S)
    return lam, psd_inverse(lam, floor=math.sqrt(floor))


def extremal_residual(chi: ChoiOperator, cert: DualCertificate, A: FidelityOperator) -> float:
    """max |(A - lambda (x) 1_K) chi|"""
    if not (chi.matrix.shape == A.matrix.shape and cert.lam.shape == (4, 4)):
        raise ContractViolationError("Choi operator, certificate and A dimensions differ")
    big_lambda = kron(cert.lam, np.eye(chi.M + 1))
    return max_abs((A.matrix - big_lambda) @ chi.matrix)


def optimize_choi(
    M: int,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    settings: OptimizerSettings = DEFAULT_OPTIMIZER,
) -> OptimizationResult:
    """
    Maximize Tr[chi A] over trace-preserving CP maps by the fixed-point map

        chi <- Lambda^{-1} A chi A Lambda^{-1},  lambda = (Tr_K[A chi A])^{1/2}

    starting from the maximally mixed feasible point 1/(M+1).

    Args:
        M: number of clones
        tol: stop when the fidelity changes by less than tol and the
            stationarity residual max|(A - lambda (x) 1_K) chi| is below
            settings.residual_factor * tol
        max_iter: iteration budget
        settings: defaults for tol/max_iter and the lambda floor

    Raises:
        NonConvergenceError: budget exhausted; carries the last iterate
        RegularizationError: lambda numerically singular
    """
    tol = settings.tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be at least 1, got {max_iter}")

    A = build_A(M)
    n = M + 1
    a = A.matrix
    identity_k = np.eye(n)
    chi = np.eye(4 * n, dtype=np.complex128) / n
    fidelity = float(np.trace(chi @ a).real)
    history = [fidelity]

    for iteration in range(1, max_iter + 1):
        x = a @ chi @ a
        lam, lam_inv = _lambda_pair(partial_trace(x, (4, n), keep=0), settings.lambda_floor)
        big_inv = kron(lam_inv, identity_k)
        chi = hermitize(big_inv @ x @ big_inv)
        new_fidelity = float(np.trace(chi @ a).real)
        change = abs(new_fidelity - fidelity)
        fidelity = new_fidelity
        history.append(fidelity)
        if iteration % settings.log_every == 0:
            logger.debug(f"optimize_choi M={M}: iteration {iteration}, F={fidelity:.15f}, dF={change:.2e}")
        if change < tol:
            lam, _ = _lambda_pair(partial_trace(a @ chi @ a, (4, n), keep=0), settings.lambda_floor)
            stationarity = max_abs((a - kron(lam, identity_k)) @ chi)
            if stationarity < settings.residual_factor * tol:
                break
    else:
        logger.warning(f"optimize_choi M={M}: no convergence after {max_iter} iterations (F={fidelity:.15f})")
        raise NonConvergenceError(max_iter, fidelity, ChoiOperator(M=M, matrix=chi))

    choi = ChoiOperator(M=M, matrix=chi)
    cert = _certificate_from_lambda(M, lam, A)
    residual = extremal_residual(choi, cert, A)
    logger.info(
        f"optimize_choi M={M}: F={fidelity:.15f} after {iteration} iterations, "
        f"gap={cert.trace - fidelity:.2e}, residual={residual:.2e}"
    )
    return OptimizationResult(
        choi=choi,
        certificate=cert,
        fidelity=fidelity,
        iterations=iteration,
        extremal_residual=residual,
        history=history,
    )


# ---------------------------------------------------------------------------
# Analytic solution
# ---------------------------------------------------------------------------

def fidelity_perp(M: int) -> float:
    """(1 + sqrt((M+2)/(3M))) / 2"""
    if M < 1:
        raise DomainError(f"M={M} must be at least 1")
    return 0.5 * (1.0 + math.sqrt((M + 2) / (3 * M)))


def dual_certificate(M: int) -> DualCertificate:
    """
    Closed-form multiplier lambda = F/6 [[1,0,0,0],[0,1,0,0],[0,0,2,-1],[0,0,-1,2]]
    checked against A.

    Raises:
        CertificateInvalidError: lambda (x) 1_K - A not PSD
    """
    A = build_A(M)
    lam = (fidelity_perp(M) / 6.0) * np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, -1], [0, 0, -1, 2]], dtype=np.complex128
    )
    cert = _certificate_from_lambda(M, lam, A)
    if not cert.is_psd:
        logger.error(f"dual_certificate M={M}: min eigenvalue {cert.min_eigenvalue:.3e}")
        raise CertificateInvalidError(M, cert.min_eigenvalue)
    return cert


def expected_mu(M: int) -> Tuple[float, float, float]:
    """(mu1, mu2, mu3) = (s/12, s/3, 0) with s = sqrt((M+2)/(3M))."""
    s = math.sqrt((M + 2) / (3 * M))
    return s / 12.0, s / 3.0, 0.0


def analytic_alpha(M: int) -> CloneCoefficients:
    """alpha_j = (-1)^j [1/sqrt(2(M+1)) + sqrt(3)(M-2j)/sqrt(2M(M+1)(M+2))]"""
    if M < 1:
        raise DomainError(f"M={M} must be at least 1")
    a_m = 1.0 / math.sqrt(2 * (M + 1))
    b_m = math.sqrt(3.0) / math.sqrt(2 * M * (M + 1) * (M + 2))
    j = np.arange(M + 1)
    alpha = (-1.0) ** j * (a_m + b_m * (M - 2 * j))
    return CloneCoefficients(M=M, alpha=alpha, aM=a_m, bM=b_m)


def build_isometry(M: int) -> CloningIsometry:
    """
    Optimal cloner as an isometry H -> K (x) K', anticlones spin-flipped.

    Columns (in H order):
        |00> ->  2b sum_k sqrt(k(M-k+1))   |k>|k-1>
        |11> -> -2b sum_k sqrt((M-k)(k+1)) |k>|k+1>
        |01> -> -sum_k [a + b(2k-M)]       |k>|k>
        |10> ->  sum_k [a - b(2k-M)]       |k>|k>
    """
    coeffs = analytic_alpha(M)
    a_m, b_m = coeffs.aM, coeffs.bM
    n = M + 1
    v = np.zeros((n * n, 4), dtype=np.complex128)
    for k in range(n):
        diag = k * n + k
        v[diag, 2] = -(a_m + b_m * (2 * k - M))
        v[diag, 3] = a_m - b_m * (2 * k - M)
        if k >= 1:
            v[k * n + k - 1, 0] = 2 * b_m * math.sqrt(k * (M - k + 1))
        if k + 1 <= M:
            v[k * n + k + 1, 1] = -2 * b_m * math.sqrt((M - k) * (k + 1))
    return CloningIsometry(M=M, matrix=v)


def input_vector(angles: BlochAngles) -> np.ndarray:
    """|psi, psi_perp> as coefficients over the H basis."""
    psi, perp = qubit_pair(angles)
    return np.array([psi[i] * perp[j] for i, j in H_BASIS])


def output_state(V: CloningIsometry, angles: BlochAngles) -> np.ndarray:
    """V|psi, psi_perp> reshaped to (M+1) x (M+1): rows clones, columns anticlones."""
    n = V.M + 1
    return (V.matrix @ input_vector(angles)).reshape(n, n)


def target_output_state(M: int, angles: BlochAngles) -> np.ndarray:
    """
    sum_j alpha_j |(M-j) psi, j psi_perp> (x) U0^M |(M-j) psi_perp, j psi>,
    reshaped like output_state.
    """
    alpha = analytic_alpha(M).alpha
    flip = collective_flip(M)
    out = np.zeros((M + 1, M + 1), dtype=np.complex128)
    for j in range(M + 1):
        clones = sym_product_state(M, M - j, angles).coeffs
        anticlones = flip @ sym_product_state(M, j, angles).coeffs
        out += alpha[j] * np.outer(clones, anticlones)
    return out


def clone_fidelities(V: CloningIsometry, angles: BlochAngles) -> Tuple[float, float]:
    """
    (single-clone fidelity vs |psi>, single-anticlone fidelity vs |psi_perp>).

    The anticlone register is rotated back by U0^M before tracing.
    """
    psi, perp = qubit_pair(angles)
    state = output_state(V, angles)
    rho_clones = state @ state.conj().T
    # applying F^T to the second factor is right-multiplication by F
    unflipped = state @ collective_flip(V.M)
    rho_anti = unflipped.T @ unflipped.conj()
    f_clone = np.vdot(psi, single_qubit_state(rho_clones) @ psi).real
    f_anti = np.vdot(perp, single_qubit_state(rho_anti) @ perp).real
    return float(f_clone), float(f_anti)


def choi_from_isometry(V: CloningIsometry) -> ChoiOperator:
    """
    chi[(h,k),(h',k')] = <R_hk|R_h'k'> with the anticlone register as ancilla.

    Raises:
        ContractViolationError: V is not an isometry
    """
    err = V.isometry_error()
    if err > 1e-10:
        raise ContractViolationError(f"Input is not an isometry (|V^dagger V - I| = {err:.3e})")
    n = V.M + 1
    # R[r, (h,k)] = V[k*n + r, h]
    r = V.matrix.reshape(n, n, 4).transpose(1, 2, 0).reshape(n, 4 * n)
    return ChoiOperator(M=V.M, matrix=hermitize(r.conj().T @ r))


# ---------------------------------------------------------------------------
# Closed-form comparisons
# ---------------------------------------------------------------------------

def fidelity_parallel(N: int, M: int) -> float:
    """Optimal N -> M universal cloner for identical copies: (MN+M+N)/(M(N+2))."""
    if N < 1 or M < N:
        raise DomainError(f"Need M >= N >= 1, got N={N}, M={M}")
    return (M * N + M + N) / (M * (N + 2))


def fidelity_perp_general(N: int, M: int) -> float:
    """
    N copies of psi plus one psi_perp cloned into M copies:

        (N+1)/(N+3) + (3(N-1) + sqrt(P/(N+2))) / (2M(N+3)),
        P = (N-1)(N^2-15N-18) + 8M(N+1)(M+3-N)
    """
    if N < 1 or M < N:
        raise DomainError(f"Need M >= N >= 1, got N={N}, M={M}")
    P = (N - 1) * (N * N - 15 * N - 18) + 8 * M * (N + 1) * (M + 3 - N)
    if P < 0:
        raise DomainError(f"P={P} negative for N={N}, M={M}")
    return (N + 1) / (N + 3) + (3 * (N - 1) + math.sqrt(P / (N + 2))) / (2 * M * (N + 3))


def measurement_limit(orthogonal: bool = True) -> float:
    """M -> infinity limit: (1 + 1/sqrt(3))/2 for |psi,psi_perp>, 3/4 for |psi,psi>."""
    return 0.5 * (1.0 + 1.0 / math.sqrt(3.0)) if orthogonal else 0.75


def crossover(N: int, m_max: int) -> CrossoverResult:
    """
    Scan M = N+1..m_max for the first strict advantage of the N+1 (one
    orthogonal) cloner over the standard (N+1) -> M cloner.

    A difference within 1e-12 of zero is a tie, reported as equality_m and
    not counted as an advantage. Not finding one is a result, not an error.
    """
    if N < 1:
        raise DomainError(f"N={N} must be at least 1")
    if m_max < N + 1:
        raise DomainError(f"m_max={m_max} must be at least N+1={N + 1}")
    rows = []
    strict_m = equality_m = None
    for M in range(N + 1, m_max + 1):
        f_perp = fidelity_perp_general(N, M)
        f_par = fidelity_parallel(N + 1, M)
        rows.append((M, f_perp, f_par))
        diff = f_perp - f_par
        if abs(diff) < EQUALITY_TOL:
            if equality_m is None:
                equality_m = M
        elif diff > 0:
            strict_m = M
            break
    logger.debug(f"crossover N={N}: strict={strict_m}, equality={equality_m}")
    return CrossoverResult(N=N, m_max=m_max, strict_m=strict_m, equality_m=equality_m, rows=tuple(rows))
