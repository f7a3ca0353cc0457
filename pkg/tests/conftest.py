import numpy as np
import pytest

from fairmmd import CellGaussian, PopulationSpec, sample_population


def make_population(pi_s=0.5, p=((0.5, 0.5), (0.5, 0.5)), means=None, var=0.25, dim=2):
    """Four Gaussian cells with isotropic covariance; means default to a
    well-separated layout used across the suite."""
    if means is None:
        means = {(0, 0): [0.0, 0.0], (0, 1): [1.5, 0.0],
                 (1, 0): [0.6, 0.8], (1, 1): [2.0, 0.5]}
    cells = {
        cell: CellGaussian(np.asarray(mu, dtype=float), var * np.eye(dim))
        for cell, mu in means.items()
    }
    return PopulationSpec(pi_s=pi_s, p_y_given_s=np.asarray(p, dtype=float), cells=cells)


def random_population(rng, biased=False, dim=2, spread=2.0, var_range=(0.1, 0.5)):
    """Random well-posed population; biased=True forces an outcome-rate gap
    of at least 0.15 between the groups."""
    means = {cell: rng.uniform(-spread, spread, size=dim)
             for cell in ((0, 0), (0, 1), (1, 0), (1, 1))}
    var = rng.uniform(*var_range)
    if biased:
        a = rng.uniform(0.2, 0.4)
        b = a + rng.uniform(0.15, 0.4)
    else:
        a = b = rng.uniform(0.3, 0.7)
    p = ((1.0 - a, a), (1.0 - b, b))
    return make_population(pi_s=rng.uniform(0.35, 0.65), p=p, means=means,
                           var=var, dim=dim)


@pytest.fixture
def unbiased_pop():
    return make_population()


@pytest.fixture
def biased_pop():
    return make_population(p=((0.7, 0.3), (0.3, 0.7)))


@pytest.fixture
def small_data(unbiased_pop):
    return sample_population(unbiased_pop, 160, seed=11)
