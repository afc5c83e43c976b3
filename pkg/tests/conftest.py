"""
Shared pytest fixtures.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config import reset_config  # noqa: E402
from fixtures.catalog import duplicated_basis, geometric_family  # noqa: E402
from frames.family import VectorFamily  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_config():
    """Tests that tweak settings must not leak into each other"""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def orthonormal5():
    return VectorFamily.from_matrix(np.eye(5))


@pytest.fixture
def duplicated8():
    return duplicated_basis(8)


@pytest.fixture(scope="session")
def geometric_small():
    """(family, map, reference) on |i| <= 64"""
    return geometric_family(W=64)


@pytest.fixture
def random_frame(rng):
    """8 complex vectors spanning C^5"""
    M = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
    return VectorFamily.from_matrix(M)
