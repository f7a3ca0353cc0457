"""Seeded, replayable random number generation.

All randomness in the package flows through :func:`rng_for`, which builds a
counter-based Philox generator from an integer seed plus an optional stream
path (e.g. ``rng_for(seed, trial_index)``).  Distinct stream paths give
independent streams, and the same (seed, path) always reproduces the same
draws, so Monte Carlo loops can be evaluated in any order — or in parallel —
without changing the aggregate.
"""

import numpy as np


def _entropy(seed: int, stream: tuple) -> tuple:
    # SeedSequence hashes trailing zero words to the same pool (documented
    # numpy behavior), so (seed, 3) and (seed, 3, 0) would collide.  Prefixing
    # the stream length makes every (seed, stream) pair a distinct pool: two
    # entropy tuples of different lengths already differ in the length word,
    # and equal-length tuples differ in some stream word.
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    return (int(seed), len(stream)) + tuple(int(s) for s in stream)


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Return a Philox generator keyed by ``seed`` and an optional stream path."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(_entropy(seed, stream))))


def subseed(seed: int, *stream: int) -> int:
    """Collapse (seed, stream...) into one integer seed for APIs taking ints."""
    return int(np.random.SeedSequence(
        _entropy(seed, stream)).generate_state(1, np.uint64)[0])
