"""Task sampling: initial configurations and goals, calibrated by plan length."""

from __future__ import annotations

import numpy as np

from .core import CENTER, SITES, EnvState, Goal
from .planner import plan_length

# Difficulty bands are ranges of optimal plan length.
BANDS = {"medium": (10, 16), "hard": (17, 29)}

_MAX_REJECTS = 10_000


class ConfigurationError(RuntimeError):
    """Raised when band sampling keeps rejecting; indicates a rule-table bug."""


def reset(rng: np.random.Generator, band: str) -> tuple[EnvState, Goal]:
    """Sample a solvable (state, goal) pair whose plan length is in the band.

    Joints are drawn uniformly from {0, 1}, the block from the placement
    sites, and the goal from the remaining sites; the arm starts open at the
    center. Pairs outside the band are rejected and redrawn.
    """
    lo, hi = BANDS[band]
    for _ in range(_MAX_REJECTS):
        door = float(rng.integers(2))
        drawers = (
            float(rng.integers(2)),
            float(rng.integers(2)),
            float(rng.integers(2)),
        )
        block_site = int(rng.integers(len(SITES)))
        goal_site = int(rng.integers(len(SITES) - 1))
        if goal_site >= block_site:
            goal_site += 1
        state = EnvState(CENTER, 0, SITES[block_site], drawers, door)
        goal = Goal(SITES[goal_site])
        steps = plan_length(state, goal)
        if steps is not None and lo <= steps <= hi:
            return state, goal
    raise ConfigurationError(
        f"no {band} task found after {_MAX_REJECTS} draws; rule table is broken"
    )
