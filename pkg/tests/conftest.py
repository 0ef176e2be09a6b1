import numpy as np
import pytest

from semihilbert_radius.config import OptConfig, SuiteConfig, SweepConfig
from semihilbert_radius.harness.ensembles import a_bounded_op, gaussian, random_weight
from semihilbert_radius.semihilbert import build_space


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def small_opt():
    """Optimizer budget small enough for unit tests"""
    return OptConfig(starts=6, seeded_starts=4, max_iter=300, seed=3)


@pytest.fixture
def small_sweep():
    return SweepConfig(grid_points=256)


@pytest.fixture
def small_suite(small_opt, small_sweep):
    return SuiteConfig(dim_min=2, dim_max=3, n_min=1, n_max=2, samples=1,
                       opt=small_opt, sweep=small_sweep)


@pytest.fixture
def invertible_space(rng):
    return build_space(random_weight(rng, 4, 4))


@pytest.fixture
def singular_space(rng):
    return build_space(random_weight(rng, 4, 2))


@pytest.fixture
def rank_one_space(rng):
    return build_space(random_weight(rng, 4, 1))


@pytest.fixture
def make_op(rng):
    """A-bounded random operator on a given space"""
    def make(space):
        return a_bounded_op(space, rng)
    return make


@pytest.fixture
def make_matrix(rng):
    def make(rows, cols=None):
        return gaussian(rng, rows, cols or rows)
    return make
