"""Seeded random streams for the simulators.

Every simulator draws from PCG64 generators. The stream for a given
``(seed, purpose, agent)`` triple is seeded with
``SeedSequence(seed, spawn_key=(PURPOSES[purpose], agent))``, so each agent
owns one independent substream per purpose. Adding agents or purposes never
perturbs the draws of existing ones, and results are identical across
platforms.
"""

from __future__ import annotations

import numpy as np

PURPOSES = {
    "init": 0,
    "noise": 1,
    "boundary": 2,
    "trigger": 3,
}


def agent_generator(seed, purpose, agent):
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(PURPOSES[purpose], int(agent)))
    return np.random.Generator(np.random.PCG64(ss))


class AgentStreams:
    """Uniform [0, 1) draws, one value per agent per call.

    Values are pulled from each agent's substream in fixed-size blocks, which
    yields the same sequence as drawing them one at a time.
    """

    def __init__(self, seed, purpose, agents, block=256):
        self._gens = [agent_generator(seed, purpose, a) for a in agents]
        self._block = block
        self._buf = np.empty((len(self._gens), 0))
        self._pos = 0

    def __len__(self):
        return len(self._gens)

    def next(self):
        if self._pos >= self._buf.shape[1]:
            if not self._gens:
                return np.empty(0)
            self._buf = np.stack([g.random(self._block) for g in self._gens])
            self._pos = 0
        out = self._buf[:, self._pos]
        self._pos += 1
        return out
