#!/usr/bin/env python3
"""
Random Streams - Counter-based generators keyed by (seed, stream index)

Each replication or bootstrap resample draws from its own Philox stream derived from
the run seed and its index, so the output of any one stream does not depend on how
many workers run or in which order streams are consumed.
"""

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream `key` under `seed`"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def rep_seed(seed: int, rep_index: int) -> int:
    """32-bit fingerprint of the stream `stream(seed, rep_index)`, recorded in rep-level output"""
    return int(np.random.SeedSequence(int(seed), spawn_key=(int(rep_index),)).generate_state(1)[0])

