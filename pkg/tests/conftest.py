import numpy as np
import pytest

from playmask.play import collect_play
from playmask.prior import PriorTrainConfig, SelectionOperator, train_prior


@pytest.fixture(scope="session")
def play_10k():
    return collect_play(10_000, seed=42)


@pytest.fixture(scope="session")
def play_1k():
    return collect_play(1_000, seed=43)


@pytest.fixture(scope="session")
def small_prior(play_10k):
    """Quickly trained prior for module tests; the acceptance suite trains
    its own at the full reference settings."""
    return train_prior(
        play_10k, PriorTrainConfig(batch=500, steps=6000, lr=1e-3, seed=0)
    )


@pytest.fixture(scope="session")
def small_selector(small_prior):
    return SelectionOperator(small_prior, rho=0.01)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
