"""Seeding the replay buffer from play data before any environment step."""

from __future__ import annotations

import numpy as np

from ..env import reset
from ..env.core import SUCCESS_TOL


def prefill(buffer, dataset, band: str, rng: np.random.Generator, demo: bool = False) -> None:
    """Turn every play record into a goal-conditioned transition.

    Goals are drawn from the task distribution of the band; rewards are
    recomputed against them with no hindsight relabeling, so successes occur
    only when a play step happens to land the block at the drawn goal.
    """
    states, actions, next_states = dataset.arrays()
    for i in range(len(dataset)):
        _, goal = reset(rng, band)
        g = np.asarray(goal.pos)
        r = 1.0 if np.abs(next_states[i, 4:7] - g).sum() < SUCCESS_TOL else 0.0
        buffer.insert(states[i], int(actions[i]), r, next_states[i], g, r == 1.0, demo=demo)
