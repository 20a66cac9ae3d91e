"""Shared fixtures and seed constants for the test suite."""

import numpy as np
import pytest

from maxratio import ConeSpec, Dataset

#: Master seed for every randomized test; change only deliberately.
SEED = 20260815


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def euclid2():
    return ConeSpec(kind="euclidean_rd", dimension=2)


@pytest.fixture
def euclid3():
    return ConeSpec(kind="euclidean_rd", dimension=3)


@pytest.fixture
def small_dataset(euclid2):
    coords = np.array(
        [
            [3.0, 4.0],
            [1.0, 0.0],
            [0.0, 2.0],
            [6.0, 8.0],
            [0.5, 0.5],
            [2.0, 0.0],
        ]
    )
    return Dataset(euclid2, coords)
