from .core import (
    ATTACH_TOL,
    CENTER,
    DOOR_HANDLE,
    DRAWER_HANDLES,
    DRAWER_INTERIORS,
    HORIZON,
    N_ACTIONS,
    RULE_VERSION,
    SHELF,
    SITES,
    SUCCESS_TOL,
    TABLE_CELLS,
    EnvState,
    Goal,
    Primitive,
    StepOutcome,
    decode_state,
    encode_state,
    feasible_any_goal,
    feasible_oracle,
    reward,
    step,
)
from .planner import plan_length, reachable_states
from .tasks import BANDS, ConfigurationError, reset

__all__ = [
    "ATTACH_TOL",
    "BANDS",
    "CENTER",
    "ConfigurationError",
    "DOOR_HANDLE",
    "DRAWER_HANDLES",
    "DRAWER_INTERIORS",
    "EnvState",
    "Goal",
    "HORIZON",
    "N_ACTIONS",
    "Primitive",
    "RULE_VERSION",
    "SHELF",
    "SITES",
    "SUCCESS_TOL",
    "StepOutcome",
    "TABLE_CELLS",
    "decode_state",
    "encode_state",
    "feasible_any_goal",
    "feasible_oracle",
    "plan_length",
    "reachable_states",
    "reset",
    "reward",
    "step",
]
