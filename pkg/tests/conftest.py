"""Shared fixtures: seeded randomness, random density matrices and Bloch angles."""
import numpy as np
import pytest

from src.core.su2kit import random_bloch


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_density(rng):
    """Factory for random full-rank density matrices of a given dimension."""

    def make(dim: int) -> np.ndarray:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    return make


@pytest.fixture
def random_angles(rng):
    """Factory for lists of Haar-uniform Bloch angles."""

    def make(count: int):
        return [random_bloch(rng) for _ in range(count)]

    return make
