"""Shortest-plan oracle over the finite abstract state graph.

The rule table only ever produces arm positions at named anchors and block
positions at named sites (or attached to the arm), so the reachable state
space is finite and small. Optimal plan lengths are computed once per
process by breadth-first search backwards from the rewarded states of each
goal, then served as O(1) lookups; task-band calibration and play resets
lean on this cache.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .core import (
    CENTER,
    SITES,
    EnvState,
    Goal,
    Primitive,
    _at_center,
    _gripped_handle,
    _site_exposed,
    _transition,
    reward,
    step,
)

_REACH_GOAL = Goal(SITES[0])  # goal-free actions ignore it
_NON_GOAL_ACTIONS = [a for a in Primitive if a != Primitive.GO_GOAL]


class _Planner:
    def __init__(self):
        self.states: list[EnvState] = []
        self.index: dict[EnvState, int] = {}
        self._build()

    def _add(self, state: EnvState, queue: deque) -> int:
        idx = self.index.get(state)
        if idx is None:
            idx = len(self.states)
            self.index[state] = idx
            self.states.append(state)
            queue.append(idx)
        return idx

    def _go_goal_feasible(self, state: EnvState, site: int) -> bool:
        return (
            _gripped_handle(state) is None
            and _at_center(state)
            and _site_exposed(site, state)
        )

    def _build(self) -> None:
        queue: deque[int] = deque()
        for door in (0.0, 1.0):
            for d1 in (0.0, 1.0):
                for d2 in (0.0, 1.0):
                    for d3 in (0.0, 1.0):
                        for site in range(len(SITES)):
                            start = EnvState(
                                CENTER, 0, SITES[site], (d1, d2, d3), door
                            )
                            self._add(start, queue)

        succ_shared: list[list[int]] = []  # per state, goal-free successors
        succ_goal: list[list[int]] = []  # per state, go-goal successor per site
        while queue:
            idx = queue.popleft()
            state = self.states[idx]
            row = []
            for action in _NON_GOAL_ACTIONS:
                out = step(state, action, _REACH_GOAL)
                row.append(-1 if out.infeasible else self._add(out.state, queue))
            grow = []
            for site in range(len(SITES)):
                if self._go_goal_feasible(state, site):
                    nxt = _transition(state, Primitive.GO_GOAL, Goal(SITES[site]))
                    grow.append(self._add(nxt, queue))
                else:
                    grow.append(-1)
            # states discovered by _add above extend the lists lazily
            while len(succ_shared) < len(self.states):
                succ_shared.append(None)
                succ_goal.append(None)
            succ_shared[idx] = row
            succ_goal[idx] = grow

        n = len(self.states)
        self.dist = np.full((n, len(SITES)), -1, dtype=np.int32)
        for site in range(len(SITES)):
            goal = Goal(SITES[site])
            preds: list[list[int]] = [[] for _ in range(n)]
            for src in range(n):
                for dst in succ_shared[src]:
                    if dst >= 0:
                        preds[dst].append(src)
                dst = succ_goal[src][site]
                if dst >= 0:
                    preds[dst].append(src)
            frontier = deque()
            for idx in range(n):
                if reward(self.states[idx], goal) == 1:
                    self.dist[idx, site] = 0
                    frontier.append(idx)
            while frontier:
                cur = frontier.popleft()
                d = self.dist[cur, site] + 1
                for prev in preds[cur]:
                    if self.dist[prev, site] < 0:
                        self.dist[prev, site] = d
                        frontier.append(prev)


_PLANNER: _Planner | None = None


def _planner() -> _Planner:
    global _PLANNER
    if _PLANNER is None:
        _PLANNER = _Planner()
    return _PLANNER


def reachable_states() -> list[EnvState]:
    """All states reachable from any reset configuration."""
    return list(_planner().states)


def plan_length(state: EnvState, goal: Goal) -> int | None:
    """Minimal number of primitives to reach reward 1; None if unreachable."""
    pl = _planner()
    site = SITES.index(goal.pos)
    idx = pl.index.get(state)
    if idx is not None:
        d = int(pl.dist[idx, site])
        return None if d < 0 else d
    # States outside the reachable closure (hand-built ones): search forward.
    if reward(state, goal) == 1:
        return 0
    seen = {state}
    frontier = deque([(state, 0)])
    while frontier:
        cur, d = frontier.popleft()
        for action in Primitive:
            out = step(cur, action, goal)
            if out.infeasible or out.state in seen:
                continue
            if out.reward == 1:
                return d + 1
            seen.add(out.state)
            frontier.append((out.state, d + 1))
    return None
