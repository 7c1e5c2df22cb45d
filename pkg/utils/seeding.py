"""
Named random sub-streams.

Every stochastic component draws from its own stream derived from one root
seed, so changing how many numbers one component consumes never shifts the
numbers another component sees.
"""
import zlib

import numpy as np

# Sub-stream names used across the project
DATA_STREAM = 'data'
INIT_STREAM = 'init'
TRIPLET_STREAM = 'triplets'
BATCHING_STREAM = 'batching'

# Root seeds are unsigned 64-bit integers
MAX_SEED = 2 ** 64 - 1


def _key(part):
    if isinstance(part, (int, np.integer)):
        return int(part)
    return zlib.crc32(str(part).encode('utf-8'))


def derive_seed(root_seed, *names):
    """Return a 32-bit seed for the sub-stream identified by ``names``."""
    sequence = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(_key(n) for n in names))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def stream(root_seed, *names):
    """Return a ``numpy.random.Generator`` for the named sub-stream."""
    return np.random.default_rng(derive_seed(root_seed, *names))
