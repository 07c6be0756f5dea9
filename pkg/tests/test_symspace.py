"""Tests for Dicke states and single-qubit marginals on the symmetric subspace."""
import math
from functools import reduce

import numpy as np
import pytest

from src.core.cloneropt import analytic_alpha, fidelity_perp
from src.core.exceptions import ContractViolationError, SizeError
from src.core.su2kit import qubit_pair, spin_flip, symmetric_product_coefficients
from src.core.symspace import (
    DickeLabel,
    clone_fidelity_series,
    collective_flip,
    dicke_vector,
    reduced_qubit,
    reduced_qubit_table,
    single_qubit_state,
    sym_product_state,
)


def test_dicke_label_validation():
    with pytest.raises(SizeError):
        DickeLabel(0, 0)
    with pytest.raises(ContractViolationError):
        DickeLabel(3, 4)


@pytest.mark.parametrize("M", [1, 2, 5, 8])
def test_dicke_vectors_orthonormal(M):
    vecs = np.array([dicke_vector(DickeLabel(M, k)) for k in range(M + 1)])
    assert np.allclose(vecs @ vecs.T, np.eye(M + 1), atol=1e-14)
    for k in range(M + 1):
        assert np.count_nonzero(vecs[k]) == math.comb(M, k)


def test_dicke_vector_size_limit():
    with pytest.raises(SizeError):
        dicke_vector(DickeLabel(21, 0))


@pytest.mark.parametrize("M", range(1, 9))
def test_reduced_qubit_matches_brute_force(M):
    vecs = [dicke_vector(DickeLabel(M, k)).reshape(2, -1) for k in range(M + 1)]
    for k in range(M + 1):
        for kp in range(M + 1):
            brute = vecs[k] @ vecs[kp].conj().T
            assert np.allclose(reduced_qubit(M, k, kp), brute, atol=1e-14)


@pytest.mark.parametrize("M", [1, 4, 9])
def test_reduced_qubit_diagonal_has_unit_trace(M):
    for k in range(M + 1):
        assert np.trace(reduced_qubit(M, k, k)).real == pytest.approx(1.0)
        if k + 2 <= M:
            assert np.all(reduced_qubit(M, k, k + 2) == 0)


def test_reduced_qubit_index_check():
    with pytest.raises(ContractViolationError):
        reduced_qubit(3, 4, 0)


def test_reduced_qubit_table_is_read_only():
    table = reduced_qubit_table(3)
    assert table.shape == (4, 4, 2, 2)
    with pytest.raises(ValueError):
        table[0, 0, 0, 0] = 1.0


@pytest.mark.parametrize("M", [1, 2, 4, 7])
def test_sym_product_state_matches_explicit_symmetrization(M, random_angles):
    for angles in random_angles(4):
        psi, perp = qubit_pair(angles)
        for j in range(M + 1):
            state = sym_product_state(M, j, angles)
            expected = symmetric_product_coefficients(psi, perp, j, M)
            assert state.norm == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(state.coeffs, expected, atol=1e-12)


def test_single_qubit_state_of_dicke_state():
    M = 5
    for k in range(M + 1):
        rho = np.zeros((M + 1, M + 1))
        rho[k, k] = 1.0
        assert np.allclose(single_qubit_state(rho), np.diag([k / M, (M - k) / M]))


def test_single_qubit_state_of_product_state(random_angles):
    for angles in random_angles(6):
        psi, _ = qubit_pair(angles)
        coeffs = sym_product_state(4, 4, angles).coeffs
        rho = np.outer(coeffs, coeffs.conj())
        assert np.allclose(single_qubit_state(rho), np.outer(psi, psi.conj()), atol=1e-12)


@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_collective_flip_matches_tensor_power(M):
    u = reduce(np.kron, [spin_flip()] * M)
    flip = collective_flip(M)
    for k in range(M + 1):
        image = u @ dicke_vector(DickeLabel(M, k))
        expected = sum(flip[kp, k] * dicke_vector(DickeLabel(M, kp)) for kp in range(M + 1))
        assert np.allclose(image, expected, atol=1e-14)
    assert np.allclose(flip.T @ flip, np.eye(M + 1))


@pytest.mark.parametrize("M", range(1, 16))
def test_clone_fidelity_series_reaches_closed_form(M):
    assert clone_fidelity_series(analytic_alpha(M)) == pytest.approx(fidelity_perp(M), abs=1e-13)


def test_clone_fidelity_series_accepts_sequences():
    # all weight on j = 0 (every clone is psi)
    assert clone_fidelity_series([1.0, 0.0, 0.0]) == 1.0
    assert clone_fidelity_series([0.0, 1.0, 0.0]) == pytest.approx(0.5)


def test_clone_fidelity_series_rejects_unnormalized():
    with pytest.raises(ContractViolationError):
        clone_fidelity_series([1.0, 1.0])


@pytest.mark.parametrize("M", range(1, 9))
def test_collective_flip_signs(M):
    flip = collective_flip(M)
    for k in range(M + 1):
        assert flip[M - k, k] == (-1) ** (M - k)
    assert np.count_nonzero(flip) == M + 1
