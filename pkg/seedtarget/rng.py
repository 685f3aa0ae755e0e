"""Random substreams.

Every random quantity in the package comes from a generator built as::

    SeedSequence(entropy=master_seed, spawn_key=(purpose, *ids)) -> Philox

SeedSequence hashes the entropy and the spawn key into the Philox key,
so a substream depends only on ``(master_seed, purpose, ids)`` and never
on which process or in which order it is requested. ``purpose`` keeps the
threshold, strategy, sampling and generator streams apart even when they
share an id.
"""
import numpy as np

from seedtarget.errors import ConfigError

THRESHOLDS = 0
STRATEGY = 1
SAMPLING = 2
SYNTHETIC = 3
RANDOM_PAIRS = 4


def substream(master_seed, purpose, *ids):
    key = (int(purpose),) + tuple(int(i) for i in ids)
    if any(k < 0 for k in key):
        raise ConfigError(f"Substream ids must be non-negative, got {key}.")
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


def truncated_normal(rng, mean, sd, size):
    """Normal(mean, sd) draws resampled until strictly positive."""
    if sd == 0:
        if mean <= 0:
            raise ConfigError(f"A zero-sd threshold needs a positive mean, got {mean}.")
        return np.full(size, float(mean))
    draws = rng.normal(mean, sd, size)
    rejected = draws <= 0
    while rejected.any():
        draws[rejected] = rng.normal(mean, sd, int(rejected.sum()))
        rejected = draws <= 0
    return draws
