import numpy as np
import pytest


def rel_l2(a, b):
    denom = max(float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) / denom


@pytest.fixture
def rng():
    return np.random.default_rng(20240805)
