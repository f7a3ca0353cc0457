"""Build a synthetic population, sample it, and round-trip through CSV.

The generative model is gaussian-per-cell: pick the group s, pick the label y
from the group's outcome rates, then draw the representation z from the
(s, y) cell's gaussian.  Everything downstream (estimators, bounds, training)
consumes the resulting LabeledDataset.
"""

import os
import tempfile

import numpy as np

from fairmmd import (
    CellGaussian,
    PopulationSpec,
    group_stats,
    population_from_dict,
    population_to_dict,
    read_csv,
    sample_population,
    write_csv,
)

# A population where group 1's representations are shifted relative to
# group 0, more strongly for the positive class.
spec = PopulationSpec(
    pi_s=0.4,
    p_y_given_s=np.array([[0.6, 0.4], [0.3, 0.7]]),
    cells={
        (0, 0): CellGaussian(np.array([0.0, 0.0]), 0.25 * np.eye(2)),
        (0, 1): CellGaussian(np.array([1.5, 0.0]), 0.25 * np.eye(2)),
        (1, 0): CellGaussian(np.array([0.6, 0.8]), 0.25 * np.eye(2)),
        (1, 1): CellGaussian(np.array([2.0, 0.5]), 0.25 * np.eye(2)),
    },
)

data = sample_population(spec, n=4000, seed=7)
print(f"sampled {data.z.shape[0]} rows, z dim = {data.z.shape[1]}")

stats = group_stats(data)
print("cell counts (rows = s, cols = y):")
print(stats.counts)
print("empirical p(y|s):")
print(np.round(stats.p_y_given_s, 4))
print("spec      p(y|s):")
print(spec.p_y_given_s)

# Sampling is a pure function of (spec, n, seed).
again = sample_population(spec, n=4000, seed=7)
assert np.array_equal(data.z, again.z)
assert np.array_equal(data.s, again.s) and np.array_equal(data.y, again.y)
print("resampling with the same seed reproduces the dataset bit for bit")

# CSV round trip preserves every float exactly (%.17g formatting).
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "dataset.csv")
    write_csv(data, path)
    loaded, scores = read_csv(path)
    assert np.array_equal(loaded.z, data.z)
    assert scores is None
    print(f"csv round trip exact: {path.split('/')[-1]} -> identical arrays")

# Population specs serialize to plain dicts (JSON-friendly).
blob = population_to_dict(spec)
back = population_from_dict(blob)
assert np.allclose(back.p_y_given_s, spec.p_y_given_s)
print("population spec round-trips through a plain dict")
