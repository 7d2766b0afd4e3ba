import numpy as np
import pytest

from latentstar import EdgeWeightVector


def random_alpha(rng: np.random.Generator, n: int) -> EdgeWeightVector:
    """Valid edge weights with uniform magnitudes and random signs."""
    magnitudes = rng.uniform(0.02, 0.98, n)
    return EdgeWeightVector(magnitudes * rng.choice([-1.0, 1.0], n))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
