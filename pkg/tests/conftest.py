import os
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

os.environ.setdefault("DRIFTGAS_LOG_FILE", os.devnull)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def two_blobs(rng):
    """Stationary, well separated two-class stream in arrival order."""

    n = 2000
    y = np.arange(n) % 2
    centers = np.array([[0.0, 0.0], [1.0, 1.0]])
    X = centers[y] + 0.1 * rng.standard_normal((n, 2))

    return X, y


@pytest.fixture
def small_run_config():
    from src.stream.core import RunConfig

    return RunConfig(num_batches=10, g_base=10, seed=3)
