"""Tests for Bloch-sphere parametrization, Haar moments and D-functions."""
import math

import numpy as np
import pytest
from scipy import integrate

from src.core.exceptions import ContractViolationError, DomainError, SizeError
from src.core.su2kit import (
    BlochAngles,
    bloch_matrix,
    haar_monomial,
    qubit_pair,
    random_bloch,
    recurrence_residual,
    spin_flip,
    symmetric_product_coefficients,
    wigner_bigD,
)


def _bloch_vector(angles: BlochAngles) -> np.ndarray:
    return np.array([
        math.sin(angles.theta) * math.cos(angles.phi),
        math.sin(angles.theta) * math.sin(angles.phi),
        math.cos(angles.theta),
    ])


def test_bloch_angles_validation():
    with pytest.raises(DomainError):
        BlochAngles(theta=4.0)
    with pytest.raises(DomainError):
        BlochAngles(theta=1.0, phi=-0.1)
    with pytest.raises(DomainError):
        BlochAngles(theta=1.0, phi=2 * math.pi)


@pytest.mark.parametrize("theta, phi", [(-0.3, 0.0), (7.0, 1.0), (math.pi + 0.2, 5.0), (0.5, -1.0)])
def test_normalized_keeps_the_point(theta, phi):
    folded = BlochAngles.normalized(theta, phi)
    assert 0.0 <= folded.theta <= math.pi
    assert 0.0 <= folded.phi < 2 * math.pi
    raw = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    assert np.allclose(_bloch_vector(folded), raw, atol=1e-12)


def test_normalized_negative_theta():
    folded = BlochAngles.normalized(-0.3, 0.0)
    assert folded.theta == pytest.approx(0.3)
    assert folded.phi == pytest.approx(math.pi)


def test_random_bloch_is_uniform(rng):
    samples = [random_bloch(rng) for _ in range(4000)]
    cos_t = np.array([math.cos(a.theta) for a in samples])
    phis = np.array([a.phi for a in samples])
    assert abs(cos_t.mean()) < 0.05
    assert abs(phis.mean() - math.pi) < 0.15
    assert np.all((phis >= 0) & (phis < 2 * math.pi))


def test_bloch_matrix_columns(random_angles):
    for angles in random_angles(20):
        d = bloch_matrix(angles)
        assert np.allclose(d.conj().T @ d, np.eye(2), atol=1e-14)
        psi, perp = qubit_pair(angles)
        assert psi[0] == pytest.approx(math.cos(angles.theta / 2))
        assert psi[1] == pytest.approx(np.exp(1j * angles.phi) * math.sin(angles.theta / 2))
        assert abs(np.vdot(psi, perp)) < 1e-15


def test_haar_monomial_values():
    assert haar_monomial(0, 0, 0) == 1.0
    assert haar_monomial(1, 0, 0) == pytest.approx(0.5)
    assert haar_monomial(1, 1, 0) == pytest.approx(1 / 6)
    assert haar_monomial(2, 3, 1) == 0.0
    assert haar_monomial(3, 3, -2) == 0.0


def test_haar_monomial_rejects_negative_exponents():
    with pytest.raises(DomainError):
        haar_monomial(-1, 0, 0)


@pytest.mark.slow
@pytest.mark.parametrize("p, q", [(p, q) for p in range(9) for q in range(9) if p + q <= 8])
def test_haar_monomial_matches_quadrature(p, q):
    def integrand(phi, theta):
        return (
            math.cos(theta / 2) ** (2 * p) * math.sin(theta / 2) ** (2 * q)
            * math.sin(theta) / (4 * math.pi)
        )

    value, _ = integrate.dblquad(integrand, 0.0, math.pi, 0.0, 2 * math.pi, epsabs=1e-14, epsrel=1e-12)
    assert haar_monomial(p, q, 0) == pytest.approx(value, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("m", [1, -1, 2, 3])
def test_phase_winding_integrates_to_zero(m):
    re, _ = integrate.quad(lambda phi: math.cos(m * phi) / (2 * math.pi), 0.0, 2 * math.pi)
    im, _ = integrate.quad(lambda phi: math.sin(m * phi) / (2 * math.pi), 0.0, 2 * math.pi)
    assert abs(re) < 1e-12 and abs(im) < 1e-12
    assert haar_monomial(1, 2, m) == 0.0


def test_symmetric_product_coefficients_normalized(random_angles):
    for angles in random_angles(5):
        psi, perp = qubit_pair(angles)
        for M in (1, 3, 6):
            for j in range(M + 1):
                coeffs = symmetric_product_coefficients(psi, perp, j, M)
                assert np.linalg.norm(coeffs) == pytest.approx(1.0, abs=1e-12)


def test_symmetric_product_coefficients_contracts():
    zero = np.array([1.0, 0.0])
    with pytest.raises(ContractViolationError):
        symmetric_product_coefficients(zero, zero, 1, 2)
    with pytest.raises(ContractViolationError):
        symmetric_product_coefficients(zero, np.array([0.0, 1.0]), 3, 2)
    with pytest.raises(SizeError):
        symmetric_product_coefficients(zero, np.array([0.0, 1.0]), 0, 21)


@pytest.mark.parametrize("M", range(1, 13))
@pytest.mark.parametrize("theta", [0.0, 0.4, 1.3, math.pi / 2, 2.9, math.pi])
def test_wigner_bigD_orthogonal(M, theta):
    D = wigner_bigD(M, theta)
    assert D.entries.shape == (M + 1, M + 1)
    assert D.orthogonality_error() < 1e-12


@pytest.mark.parametrize("M", range(1, 11))
@pytest.mark.parametrize("theta", [0.3, 1.1, 2.5])
def test_wigner_bigD_recurrence(M, theta):
    D = wigner_bigD(M, theta)
    for k in range(M + 1):
        for j in range(M + 1):
            assert recurrence_residual(D, k, j) < 1e-10


def test_wigner_bigD_at_north_pole():
    # psi = |0>, psi_perp = -|1>
    M = 4
    D = wigner_bigD(M, 0.0)
    expected = np.diag([(-1) ** (M - j) for j in range(M + 1)])
    assert np.allclose(D.entries, expected, atol=1e-15)


def test_wigner_bigD_size_limits():
    with pytest.raises(SizeError):
        wigner_bigD(0, 0.1)
    with pytest.raises(SizeError):
        wigner_bigD(21, 0.1)


def test_recurrence_residual_index_check():
    with pytest.raises(ContractViolationError):
        recurrence_residual(wigner_bigD(2, 0.5), 3, 0)


def test_spin_flip():
    u0 = spin_flip()
    assert np.allclose(u0 @ np.array([1, 0]), [0, 1])
    assert np.allclose(u0 @ np.array([0, 1]), [-1, 0])
    assert np.allclose(u0.conj().T @ u0, np.eye(2))
