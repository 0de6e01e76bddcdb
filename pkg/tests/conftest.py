import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make_blobs(n_pos=40, n_neg=60, d=2, gap=10.0, seed=0):
    """Two tight Gaussian clouds `gap` units apart along the first axis."""
    rng = np.random.default_rng(seed)
    Xp = rng.normal(0.0, 0.5, size=(n_pos, d))
    Xm = rng.normal(0.0, 0.5, size=(n_neg, d))
    Xp[:, 0] += gap
    X = np.vstack([Xp, Xm])
    y = np.r_[np.ones(n_pos, dtype=int), -np.ones(n_neg, dtype=int)]
    return X, y


@pytest.fixture
def blobs():
    from extreme_entropy.dataset import Dataset
    X, y = make_blobs()
    return Dataset(X, y, "blobs")
