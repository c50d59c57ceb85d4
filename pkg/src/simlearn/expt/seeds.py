"""Seed derivation for sweeps.

Every instance gets one 32-bit ``instance_seed`` from ``(master_seed, index)``.
Each probe component then draws its own seed from ``(instance_seed, stream)``
with the stream constants below. Both steps go through
``numpy.random.SeedSequence``, so streams are statistically independent and
reseeding one component leaves the others untouched.

The instance seed does not depend on the resource value or on ``d``: instance
``i`` at chi=2 and at chi=16 shares its network initialization, projection and
minibatch order. Trends across the resource axis are therefore paired.
"""
import numpy as np

TARGET = 0
SAMPLING = 1
INIT = 2
PROJECTION = 3
POWER = 4
MINIBATCH = 5

STREAMS = {"target": TARGET, "sampling": SAMPLING, "init": INIT, "projection": PROJECTION,
           "power": POWER, "minibatch": MINIBATCH}


def _word(entropy) -> int:
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def instance_seed(master_seed: int, index: int) -> int:
    if master_seed < 0 or index < 0:
        raise ValueError("seeds and indices must be non-negative")
    return _word([master_seed, index])


def stream_seed(inst_seed: int, stream: int | str) -> int:
    if isinstance(stream, str):
        stream = STREAMS[stream]
    return _word([inst_seed, stream])
