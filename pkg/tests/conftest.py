import numpy as np
import pytest

from dirac_toeplitz import gbdt


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def example():
    return gbdt.example_triple()


@pytest.fixture(scope="session")
def trivial():
    return gbdt.trivial_triple()


def random_triples(count, seed0=0, dims=((1, 1), (2, 1), (2, 2), (3, 1), (3, 2))):
    out = []
    for i in range(count):
        n, p = dims[i % len(dims)]
        out.append(gbdt.random_triple(np.random.default_rng(seed0 + i), n, p))
    return out
