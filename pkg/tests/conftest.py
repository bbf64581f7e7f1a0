import numpy as np
import pytest


def random_density(rng, rank=None):
    """Random density matrix from a complex Ginibre matrix."""
    rank = rank or 4
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
