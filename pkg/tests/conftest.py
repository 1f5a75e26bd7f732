"""Shared generators for randomized checks.

The independent oracle for most properties is direct construction:
random centered point clouds give exact EDMs of known embedding
dimension without going through any transform under test.
"""

import numpy as np
import pytest

from edmshrink import EdmMatrix, SymHollowMatrix, edm_from_coords


def random_cloud(rng, n, k, scale=1.0):
    """Centered Gaussian points, the oracle generator for exact EDMs."""
    p = rng.normal(scale=scale, size=(n, k))
    return p - p.mean(axis=0, keepdims=True)


def random_edm(rng, n, k, scale=1.0) -> EdmMatrix:
    return edm_from_coords(random_cloud(rng, n, k, scale))


def random_hollow(rng, n, scale=1.0) -> SymHollowMatrix:
    """Random symmetric hollow matrix, entries of either sign."""
    a = rng.normal(scale=scale, size=(n, n))
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    return SymHollowMatrix(a)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
