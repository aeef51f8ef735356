"""
Seeded random substreams.

Every stochastic draw in the simulator and the agents pulls from a
generator keyed by (seed, module, step, stream), so results never depend on
evaluation order. The bit generator is the counter-based Philox. Hot
per-step draws (odometry, gyro) are served from cached blocks of steps.
"""

from functools import lru_cache

import numpy as np

MODULE_IDS = {
    'simulation': 1,
    'perception': 2,
    'localization': 3,
    'behaviors': 4,
    'kick_timing': 5,
    'harness': 6,
}

_MASK64 = (1 << 64) - 1


def substream(seed, module, step=0, stream=0):
    """
    Build the generator for one (seed, module, step, stream) key.

    Args:
        seed: 64-bit run seed
        module: module name, one of MODULE_IDS
        step: simulation step index
        stream: extra discriminator (robot id, trial index, ...)

    Returns:
        numpy.random.Generator over Philox
    """
    entropy = [int(seed) & _MASK64, MODULE_IDS[module], int(step), int(stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


BLOCK_STEPS = 500
_BLOCK_TAG = 1


@lru_cache(maxsize=128)
def _normal_block(seed, module, block, stream, width):
    entropy = [seed, MODULE_IDS[module], block, stream, _BLOCK_TAG]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
    values = rng.standard_normal((BLOCK_STEPS, width))
    values.flags.writeable = False
    return values


def normal_draws(seed, module, step, stream=0, width=1):
    """
    ``width`` standard normal draws for one (seed, module, step, stream) key.

    Per-step draws come out of blocks of BLOCK_STEPS steps generated at once,
    so the result is still a pure function of the key.

    Returns:
        read-only numpy array of shape (width,)
    """
    block, offset = divmod(int(step), BLOCK_STEPS)
    return _normal_block(int(seed) & _MASK64, module, block, int(stream), int(width))[offset]
