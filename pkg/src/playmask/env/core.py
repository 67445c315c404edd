"""Deterministic symbolic desk environment.

A single block lives on a desk with a sliding-door cabinet (a shelf behind
the door) and a three-drawer cabinet. The arm executes ten object-centric
primitives; each primitive is one timestep. Feasibility is decided by the
rule table below and infeasible attempts leave the state unaltered. Reward
is sparse: 1 exactly when the block's L1 distance to the goal position is
below 0.1.

Geometry (normalized workspace coordinates):

- door handle   (0.90, 0.50, 0.50); shelf behind the door (0.90, 0.50, 0.30)
- drawer handles top-to-bottom (0.10, 0.70/0.50/0.30, 0.45), interiors at
  the handle xy with z=0.35 (handles sit a full success-radius above the
  interiors, so holding the block at a handle never counts as delivery)
- center rest pose (0.50, 0.50, 0.60)
- 3x3 grid of table cells, x,y in {0.30, 0.50, 0.70}, z=0.25

Rule table:

- Reach primitives teleport the arm to their anchor and, except for
  go-center, require the arm to start from the center rest pose: lateral
  moves between fixtures collide with the desk furniture, so the center
  acts as the free waypoint. All reach primitives are infeasible while the
  gripper is closed around a fixture handle.
- go-drawer2-handle additionally needs drawer 1 closed (the open drawer
  above blocks it); go-drawer3-handle needs drawer 2 closed. go-block and
  go-goal need their target site exposed: shelf requires the door open,
  drawer interiors require that drawer open. go-block is infeasible while
  the block is already held.
- grasp/release toggles the gripper. Closing requires the arm within
  0.05 (L-inf) of the block or of a handle; closing at the block attaches
  it (it then tracks the arm exactly). Opening is always feasible when
  closed; a held block drops to the nearest placement site currently able
  to support it (table cells, shelf, open drawer interiors).
- pull/push toggles a drawer joint between 0 and 1 and requires the gripper
  closed on that drawer's handle; slide does the same for the door.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

N_ACTIONS = 10
ATTACH_TOL = 0.05  # strict L-inf proximity for grasping/attachment
SUCCESS_TOL = 0.1  # strict L1 threshold on block-to-goal distance
OPEN_THRESHOLD = 0.5
HORIZON = 100
RULE_VERSION = "desk-rules-1"

DOOR_HANDLE = (0.90, 0.50, 0.50)
DRAWER_HANDLES = (
    (0.10, 0.70, 0.45),
    (0.10, 0.50, 0.45),
    (0.10, 0.30, 0.45),
)
CENTER = (0.50, 0.50, 0.60)
SHELF = (0.90, 0.50, 0.30)
DRAWER_INTERIORS = (
    (0.10, 0.70, 0.35),
    (0.10, 0.50, 0.35),
    (0.10, 0.30, 0.35),
)
TABLE_CELLS = tuple(
    (x, y, 0.25) for x in (0.30, 0.50, 0.70) for y in (0.30, 0.50, 0.70)
)

# Named placement sites: 9 table cells, the shelf, 3 drawer interiors.
SITES = TABLE_CELLS + (SHELF,) + DRAWER_INTERIORS
SHELF_SITE = 9
DRAWER_SITES = (10, 11, 12)
_SITE_INDEX = {s: i for i, s in enumerate(SITES)}


class Primitive(IntEnum):
    """The ten motion primitives, in their canonical index order."""

    GO_DOOR_HANDLE = 0
    GO_DRAWER1_HANDLE = 1
    GO_DRAWER2_HANDLE = 2
    GO_DRAWER3_HANDLE = 3
    GO_CENTER = 4
    GO_BLOCK = 5
    GO_GOAL = 6
    GRASP_RELEASE = 7
    PULL_PUSH = 8
    SLIDE = 9


@dataclass(frozen=True)
class EnvState:
    """Snapshot of the desk; encodes to exactly 11 reals."""

    ee: tuple[float, float, float]
    gripper: int  # 0 open, 1 closed
    block: tuple[float, float, float]
    drawers: tuple[float, float, float]  # 0 closed, 1 open
    door: float  # 0 closed, 1 open


@dataclass(frozen=True)
class Goal:
    """Desired block position; always one of the named placement sites."""

    pos: tuple[float, float, float]

    def __post_init__(self):
        if site_index(self.pos) is None:
            raise ValueError(f"goal {self.pos} is not a named placement site")


@dataclass(frozen=True)
class StepOutcome:
    state: EnvState
    infeasible: bool
    reward: int
    done: bool


def encode_state(state: EnvState) -> np.ndarray:
    """Arm (3), gripper (1), block (3), drawers (3), door (1)."""
    return np.array(
        state.ee + (float(state.gripper),) + state.block + state.drawers + (state.door,)
    )


def decode_state(vec) -> EnvState:
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (11,):
        raise ValueError(f"state vector must have 11 entries, got shape {vec.shape}")
    if np.any(vec < -1e-9) or np.any(vec > 1.0 + 1e-9):
        raise ValueError(f"state components outside [0, 1]: {vec}")
    gripper = vec[3]
    if abs(gripper) > 1e-9 and abs(gripper - 1.0) > 1e-9:
        raise ValueError(f"gripper flag must be 0 or 1, got {gripper}")
    return EnvState(
        ee=tuple(vec[0:3]),
        gripper=int(round(gripper)),
        block=tuple(vec[4:7]),
        drawers=tuple(vec[7:10]),
        door=float(vec[10]),
    )


def site_index(pos) -> int | None:
    """Index of the named site at `pos`, or None."""
    key = (round(pos[0], 9), round(pos[1], 9), round(pos[2], 9))
    return _SITE_INDEX.get(key)


def _linf(a, b) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]), abs(a[2] - b[2]))


def _attached(state: EnvState) -> bool:
    return state.gripper == 1 and _linf(state.ee, state.block) < ATTACH_TOL


def _gripped_handle(state: EnvState):
    """'door', a drawer index 0-2, or None. A held block takes precedence."""
    if state.gripper != 1 or _attached(state):
        return None
    if _linf(state.ee, DOOR_HANDLE) < ATTACH_TOL:
        return "door"
    for i, handle in enumerate(DRAWER_HANDLES):
        if _linf(state.ee, handle) < ATTACH_TOL:
            return i
    return None


def _at_center(state: EnvState) -> bool:
    return _linf(state.ee, CENTER) < 1e-9


def _site_exposed(site: int, state: EnvState) -> bool:
    if site == SHELF_SITE:
        return state.door >= OPEN_THRESHOLD
    if site in DRAWER_SITES:
        return state.drawers[site - DRAWER_SITES[0]] >= OPEN_THRESHOLD
    return True  # table cells


def _block_exposed(state: EnvState) -> bool:
    site = site_index(state.block)
    if site is None:
        # Held blocks sit at the arm; off-site positions only occur there.
        return True
    return _site_exposed(site, state)


def _drop_site(state: EnvState) -> int:
    """Nearest site (xy distance) able to receive a released block."""
    candidates = list(range(9)) + [SHELF_SITE]
    candidates += [s for s in DRAWER_SITES if _site_exposed(s, state)]
    best, best_d = None, None
    for s in candidates:
        d = (SITES[s][0] - state.ee[0]) ** 2 + (SITES[s][1] - state.ee[1]) ** 2
        if best_d is None or d < best_d - 1e-12:
            best, best_d = s, d
    return best


def feasible(state: EnvState, action: Primitive, goal: Goal) -> bool:
    """Rule-table feasibility of one primitive."""
    action = Primitive(action)
    handle = _gripped_handle(state)
    if action == Primitive.GRASP_RELEASE:
        if state.gripper == 1:
            return True
        if _linf(state.ee, state.block) < ATTACH_TOL:
            return True
        if _linf(state.ee, DOOR_HANDLE) < ATTACH_TOL:
            return True
        return any(_linf(state.ee, h) < ATTACH_TOL for h in DRAWER_HANDLES)
    if action == Primitive.PULL_PUSH:
        return handle in (0, 1, 2)
    if action == Primitive.SLIDE:
        return handle == "door"

    # Reach primitives: never while gripping a fixture handle.
    if handle is not None:
        return False
    if action == Primitive.GO_CENTER:
        return True
    if not _at_center(state):
        return False
    if action == Primitive.GO_DRAWER2_HANDLE:
        return state.drawers[0] < OPEN_THRESHOLD
    if action == Primitive.GO_DRAWER3_HANDLE:
        return state.drawers[1] < OPEN_THRESHOLD
    if action == Primitive.GO_BLOCK:
        return not _attached(state) and _block_exposed(state)
    if action == Primitive.GO_GOAL:
        return _site_exposed(site_index(goal.pos), state)
    return True  # GO_DOOR_HANDLE, GO_DRAWER1_HANDLE from center


def _transition(state: EnvState, action: Primitive, goal: Goal) -> EnvState:
    """Apply a feasible primitive."""
    attached = _attached(state)

    def move(dest):
        block = dest if attached else state.block
        return EnvState(dest, state.gripper, block, state.drawers, state.door)

    if action == Primitive.GO_DOOR_HANDLE:
        return move(DOOR_HANDLE)
    if action == Primitive.GO_DRAWER1_HANDLE:
        return move(DRAWER_HANDLES[0])
    if action == Primitive.GO_DRAWER2_HANDLE:
        return move(DRAWER_HANDLES[1])
    if action == Primitive.GO_DRAWER3_HANDLE:
        return move(DRAWER_HANDLES[2])
    if action == Primitive.GO_CENTER:
        return move(CENTER)
    if action == Primitive.GO_BLOCK:
        return move(state.block)
    if action == Primitive.GO_GOAL:
        return move(goal.pos)
    if action == Primitive.GRASP_RELEASE:
        if state.gripper == 0:
            return EnvState(state.ee, 1, state.block, state.drawers, state.door)
        block = SITES[_drop_site(state)] if attached else state.block
        return EnvState(state.ee, 0, block, state.drawers, state.door)
    if action == Primitive.PULL_PUSH:
        i = _gripped_handle(state)
        drawers = list(state.drawers)
        drawers[i] = 0.0 if drawers[i] >= OPEN_THRESHOLD else 1.0
        return EnvState(state.ee, state.gripper, state.block, tuple(drawers), state.door)
    if action == Primitive.SLIDE:
        door = 0.0 if state.door >= OPEN_THRESHOLD else 1.0
        return EnvState(state.ee, state.gripper, state.block, state.drawers, door)
    raise ValueError(f"unknown primitive {action}")


def reward(state: EnvState, goal: Goal) -> int:
    d = sum(abs(b - g) for b, g in zip(state.block, goal.pos))
    return 1 if d < SUCCESS_TOL else 0


def step(state: EnvState, action: Primitive, goal: Goal) -> StepOutcome:
    action = Primitive(action)
    if not feasible(state, action, goal):
        return StepOutcome(state, True, reward(state, goal), reward(state, goal) == 1)
    nxt = _transition(state, action, goal)
    r = reward(nxt, goal)
    return StepOutcome(nxt, False, r, r == 1)


def feasible_oracle(state: EnvState, goal: Goal) -> frozenset[Primitive]:
    """Ground-truth feasible set; exactly the non-infeasible steps."""
    return frozenset(a for a in Primitive if feasible(state, a, goal))


def feasible_any_goal(state: EnvState) -> frozenset[Primitive]:
    """Goal-free feasible set: the union of feasible sets over all goals.

    Only go-goal depends on the goal, and some goal site (a table cell) is
    always exposed, so the union admits go-goal whenever the arm could reach
    any goal. This is the reference set for goal-independent prior quality.
    """
    out = set()
    for a in Primitive:
        if a == Primitive.GO_GOAL:
            if _gripped_handle(state) is None and _at_center(state):
                out.add(a)
        elif feasible(state, a, _ANY_GOAL):
            out.add(a)
    return frozenset(out)


_ANY_GOAL = Goal(TABLE_CELLS[0])
