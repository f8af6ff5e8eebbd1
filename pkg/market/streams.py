"""
Named random sub-streams derived from one master seed.

Every consumer of randomness gets its own ``numpy.random.Generator`` keyed
by (master seed, stream name, extra keys), so changing the agent mix never
perturbs the fundamental path and runs are reproducible bit for bit.
"""

import numpy as np

STREAMS = {
    'fundamental': 0,
    'scheduler': 1,
    'ga': 2,
    'agents': 3,
    'costs': 4,
    'seeds': 5,
}


class StreamFactory:
    """Hands out independent generators for one run"""

    def __init__(self, seed):
        if seed is None or int(seed) < 0:
            raise ValueError('seed must be a non-negative integer')
        self.seed = int(seed)

    def stream(self, name, *keys):
        key = (STREAMS[name],) + tuple(int(k) for k in keys)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    def agent(self, agent_id):
        return self.stream('agents', agent_id)


def derive_seeds(master_seed, count):
    """Deterministic list of run seeds for a campaign or sweep"""
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(STREAMS['seeds'],))
    state = sequence.generate_state(count, dtype=np.uint32)
    return [int(s) for s in state]
