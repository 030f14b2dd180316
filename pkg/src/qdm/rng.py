"""Counter-keyed random streams.

Every random draw in the package comes from a generator keyed by
(seed, operation name, counters...), so results do not depend on how work
is split across workers or in which order chunks finish.
"""

import zlib

import numpy as np


def op_code(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def stream(seed: int, op: str, *counters: int) -> np.random.Generator:
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, op_code(op), *(int(c) for c in counters)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def derive_seed(rng: np.random.Generator) -> int:
    """Draw a fresh base seed from a caller-supplied generator."""
    return int(rng.integers(0, 2**63 - 1))
