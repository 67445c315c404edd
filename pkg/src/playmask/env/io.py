"""State and goal serialization: 11- and 3-element rows, CSV and JSONL.

Every file carries the rule-table version so stale data cannot silently
cross a geometry change.
"""

from __future__ import annotations

import json

import numpy as np

from .core import RULE_VERSION, EnvState, Goal, decode_state, encode_state

_STATE_COLUMNS = "ee_x,ee_y,ee_z,gripper,block_x,block_y,block_z,drawer1,drawer2,drawer3,door"
_GOAL_COLUMNS = "goal_x,goal_y,goal_z"


def save_states_csv(states: list[EnvState], path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# rules={RULE_VERSION}\n")
        fh.write(_STATE_COLUMNS + "\n")
        for state in states:
            fh.write(",".join(repr(float(v)) for v in encode_state(state)) + "\n")


def load_states_csv(path) -> list[EnvState]:
    with open(path) as fh:
        version_line = fh.readline().strip()
        _check_version(version_line.removeprefix("# rules="), path)
        header = fh.readline().strip()
        if header != _STATE_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header!r}")
        return [
            decode_state(np.array([float(tok) for tok in line.split(",")]))
            for line in fh
            if line.strip()
        ]


def save_states_jsonl(states: list[EnvState], path, goals: list[Goal] | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"rules": RULE_VERSION, "size": len(states)}) + "\n")
        for i, state in enumerate(states):
            row = {"state": encode_state(state).tolist()}
            if goals is not None:
                row["goal"] = list(goals[i].pos)
            fh.write(json.dumps(row) + "\n")


def load_states_jsonl(path) -> tuple[list[EnvState], list[Goal] | None]:
    with open(path) as fh:
        header = json.loads(fh.readline())
        _check_version(header.get("rules"), path)
        states, goals = [], []
        for line in fh:
            row = json.loads(line)
            states.append(decode_state(np.asarray(row["state"])))
            if "goal" in row:
                goals.append(Goal(tuple(row["goal"])))
    return states, (goals if goals else None)


def _check_version(version, path) -> None:
    if version != RULE_VERSION:
        raise ValueError(
            f"{path}: written under rules {version!r}, need {RULE_VERSION!r}"
        )
