import numpy as np
import pytest

from sitewise import _kernels
from sitewise.criteria import CANONICAL_CRITERIA
from sitewise.overlay import WeightVector


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens once here so timed tests measure the algorithms
    _kernels.warmup()


@pytest.fixture(scope="session")
def criterion_names():
    return tuple(n for n, _ in CANONICAL_CRITERIA)


@pytest.fixture(scope="session")
def planted_weights(criterion_names):
    return WeightVector(criterion_names,
                        np.array([0.40, 0.25, 0.15, 0.10, 0.05, 0.03, 0.02]))


@pytest.fixture(scope="session")
def small_bundle(planted_weights):
    from sitewise import synth

    return synth.make_bundle(11, planted_weights, ncols=40, nrows=36,
                             n_counties=4, n_facilities=3, n_candidates=30)
