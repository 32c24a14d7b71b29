"""Shared test helpers."""

import numpy as np
import pytest

from tkmeans import kmeans_ops


def random_assignment(rng, k, n):
    """Random valid (k, n) assignment with no empty cluster."""
    assert n >= k
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    return kmeans_ops.labels_to_assignment(labels, k)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
