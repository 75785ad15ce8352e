import numpy as np
import pytest

from saddlesim import shepherd


@pytest.fixture(scope="session")
def benchmark_scenario():
    """The default benchmark draw (seed 1) shared across test modules."""
    return shepherd.generate_sheep_paths(seed=1)


@pytest.fixture(scope="session")
def small_scenario():
    """Cheaper scenario for unit tests that do not need benchmark parameters."""
    return shepherd.generate_sheep_paths(seed=3, n=12, n_sheep=12, L=2, noise_cells=400)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
