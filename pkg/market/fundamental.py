"""
Fundamental value as a compound Poisson jump process.

Each step draws N ~ Poisson(phi) jumps, each uniform on (-tick, tick)
(or +/- one tick with equal probability under the two-point reading).
The value is a latent expectation and is never rounded to the grid.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

UNIFORM = 'uniform'
TWO_POINT = 'two_point'


@dataclass
class FundamentalPath:
    """v[0..T] with v[0] = v0"""
    values: np.ndarray
    clamped: int = 0

    def __len__(self):
        return len(self.values)

    @property
    def log_returns(self):
        return np.diff(np.log(self.values))


def jump_increments(rng, size, phi=4.0, tick=0.01, jumps=UNIFORM):
    """Per-step sums of the Poisson jumps, shape (size,)"""
    counts = rng.poisson(phi, size)
    total = int(counts.sum())
    if jumps == UNIFORM:
        deltas = rng.uniform(-tick, tick, total)
    elif jumps == TWO_POINT:
        deltas = tick * (2 * rng.integers(0, 2, total) - 1)
    else:
        raise ValueError(f'unknown jump distribution {jumps!r}')
    increments = np.zeros(size)
    np.add.at(increments, np.repeat(np.arange(size), counts), deltas)
    return increments


def step_fundamental(v, rng, phi=4.0, tick=0.01, jumps=UNIFORM):
    """One step of the jump process; non-positive results clamp to one tick"""
    if v <= 0:
        raise ValueError('fundamental value must be positive')
    nxt = v + jump_increments(rng, 1, phi, tick, jumps)[0]
    if nxt <= 0:
        logger.warning('fundamental value hit %.6f, clamped to one tick', nxt)
        return tick
    return float(nxt)


def generate_path(v0, steps, rng, phi=4.0, tick=0.01, jumps=UNIFORM):
    """Length steps+1 path; deterministic for a given generator state"""
    if steps < 0:
        raise ValueError('steps must be non-negative')
    increments = jump_increments(rng, steps, phi, tick, jumps)
    values = v0 + np.concatenate(([0.0], np.cumsum(increments)))
    clamped = 0
    if steps and values.min() <= 0:
        # rebuild sequentially so a clamp carries into later steps
        values[0] = v0
        for t in range(steps):
            nxt = values[t] + increments[t]
            if nxt <= 0:
                clamped += 1
                nxt = tick
            values[t + 1] = nxt
        logger.warning('fundamental path clamped at %d steps (degenerate path)', clamped)
    return FundamentalPath(values=values, clamped=clamped)
