import numpy as np
import pytest

from coneighbor.data import from_arrays
from coneighbor.synthetic import random_stream


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_graph():
    """Six events on four nodes with edge features, already sorted."""
    src = [0, 1, 2, 0, 3, 1]
    dst = [1, 2, 3, 2, 0, 3]
    t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    feats = np.arange(12, dtype=float).reshape(6, 2)
    return from_arrays(src, dst, t, edge_feats=feats)


@pytest.fixture(scope="session")
def small_stream():
    """A reusable random stream big enough to split and train on."""
    return random_stream(30, 400, seed=7, edge_dim=2, node_dim=3)
