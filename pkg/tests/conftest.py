import numpy as np
import pytest

from repairroute.core import LabeledDataset


def random_instance(seed, M, low=1.0, high=10.0, wlow=0.05, whigh=1.0, integer=False):
    """Seeded routing instance: weights plus a dense asymmetric distance matrix."""
    rng = np.random.default_rng(seed)
    if integer:
        D = rng.integers(1, 6, size=(M, M)).astype(float)
    else:
        D = rng.uniform(low, high, size=(M, M))
    np.fill_diagonal(D, 0.0)
    w = rng.uniform(wlow, whigh, size=M)
    return w, D


def blobs(seed, per_side=20, d=2, sep=1.5, scale=1.0):
    """Two labeled Gaussian clusters, the stock training set for fit tests."""
    rng = np.random.default_rng(seed)
    plus = rng.normal(sep, scale, size=(per_side, d))
    minus = rng.normal(-sep, scale, size=(per_side, d))
    return LabeledDataset(
        features=np.vstack([plus, minus]),
        labels=np.array([1.0] * per_side + [-1.0] * per_side),
    )


@pytest.fixture
def small_blobs():
    return blobs(7, per_side=15)
