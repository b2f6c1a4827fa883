import warnings

import numpy as np
import pytest

from coupledchains import build_channel_model, random_model, stationary_law

X_TABLE = np.array([[0.7, 0.3], [0.3, 0.7]])
NOISY = np.array([[0.9, 0.1], [0.1, 0.9]])

CORPUS_SEEDS = tuple(range(1, 51))
CORPUS_PARAMS = dict(size=2, order=1, floor=0.05, fidelity=0.7)


def channel(eps: float):
    emission = np.array([[1.0 - eps, eps], [eps, 1.0 - eps]])
    return build_channel_model(X_TABLE, emission)


@pytest.fixture(scope="session")
def ref_model():
    """Binary symmetric hidden chain (stay 0.7) through a 0.1-flip channel."""
    kernel = channel(0.1)
    return kernel, stationary_law(kernel)


@pytest.fixture(scope="session")
def noiseless_model():
    kernel = channel(0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        law = stationary_law(kernel)
    return kernel, law


@pytest.fixture(scope="session")
def corpus():
    """The 50-seed acceptance corpus with precomputed stationary laws."""
    models = []
    for seed in CORPUS_SEEDS:
        kernel = random_model(seed, **CORPUS_PARAMS)
        models.append((seed, kernel, stationary_law(kernel)))
    return models
