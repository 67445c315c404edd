"""Task-agnostic play data: collection, persistence, interactive entry.

Play records are (state, primitive, next state) triples gathered by rolling
episodes with actions drawn uniformly from the feasible set, or typed in by
an operator at a terminal. Datasets persist as JSONL: a header object
carrying the rule-table version, seed and size, then one record per line.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .env import (
    HORIZON,
    RULE_VERSION,
    EnvState,
    Primitive,
    decode_state,
    encode_state,
    feasible_oracle,
    reset,
    step,
)

_BANDS = ("medium", "hard")


@dataclass
class PlayRecord:
    state: np.ndarray
    action: int
    next_state: np.ndarray


@dataclass
class PlayDataset:
    records: list[PlayRecord]
    header: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stacked (states, actions, next_states) views of the records."""
        s = np.stack([r.state for r in self.records])
        a = np.array([r.action for r in self.records], dtype=np.int64)
        sp = np.stack([r.next_state for r in self.records])
        return s, a, sp


def collect_play(n: int, seed: int) -> PlayDataset:
    """Roll uniformly-random feasible actions until n records are gathered.

    Episodes reset from both difficulty bands with the standard horizon, so
    the data covers the state space without preferring any task.
    """
    if n < 1:
        raise ValueError("need at least one record")
    rng = np.random.default_rng(seed)
    records: list[PlayRecord] = []
    while len(records) < n:
        band = _BANDS[rng.integers(len(_BANDS))]
        state, goal = reset(rng, band)
        for _ in range(HORIZON):
            feas = sorted(feasible_oracle(state, goal))
            action = int(feas[rng.integers(len(feas))])
            out = step(state, action, goal)
            records.append(
                PlayRecord(encode_state(state), action, encode_state(out.state))
            )
            state = out.state
            if out.done or len(records) >= n:
                break
    return PlayDataset(
        records, {"rules": RULE_VERSION, "seed": seed, "size": n}
    )


def save_dataset(dataset: PlayDataset, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(dataset.header) + "\n")
        for rec in dataset.records:
            fh.write(
                json.dumps(
                    {
                        "s": rec.state.tolist(),
                        "a": int(rec.action),
                        "sp": rec.next_state.tolist(),
                    }
                )
                + "\n"
            )


def load_dataset(path) -> PlayDataset:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty dataset file")
    header = json.loads(lines[0])
    version = header.get("rules")
    if version != RULE_VERSION:
        raise ValueError(
            f"{path}: dataset built against rules {version!r}, need {RULE_VERSION!r}"
        )
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
            s = np.asarray(obj["s"], dtype=np.float64)
            sp = np.asarray(obj["sp"], dtype=np.float64)
            action = int(obj["a"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: bad record at line {lineno}: {exc}") from None
        if s.shape != (11,) or sp.shape != (11,):
            raise ValueError(f"{path}: wrong vector length at line {lineno}")
        if not 0 <= action < len(Primitive):
            raise ValueError(f"{path}: action out of range at line {lineno}")
        records.append(PlayRecord(s, action, sp))
    declared = header.get("size")
    if declared is not None and declared != len(records):
        raise ValueError(
            f"{path}: header declares {declared} records, found {len(records)}"
        )
    return PlayDataset(records, header)


def validate_against_env(dataset: PlayDataset) -> None:
    """Re-execute every record; raise if any does not replay exactly.

    Non-go-goal primitives transition independently of the goal. A go-goal
    record is validated against the goal site its next state reveals (the
    arm lands exactly on the goal).
    """
    from .env.core import SITES, Goal, site_index

    any_goal = Goal(SITES[0])
    for i, rec in enumerate(dataset.records):
        state = decode_state(rec.state)
        expected = decode_state(rec.next_state)
        if rec.action == Primitive.GO_GOAL:
            site = site_index(expected.ee)
            if site is None:
                raise ValueError(f"record {i}: go-goal lands off-site")
            goal = Goal(SITES[site])
        else:
            goal = any_goal
        out = step(state, rec.action, goal)
        if out.infeasible or out.state != expected:
            raise ValueError(f"record {i}: does not replay against the rules")


def interactive_play(seed: int, stream_in=None, stream_out=None) -> PlayDataset:
    """Terminal collection loop: show the state, read primitive indices.

    Feasible choices are executed and recorded; infeasible ones are reported
    and skipped. 'q' ends the session and returns what was gathered.
    """
    stream_in = stream_in or sys.stdin
    stream_out = stream_out or sys.stdout
    rng = np.random.default_rng(seed)
    records: list[PlayRecord] = []
    state, goal = reset(rng, _BANDS[rng.integers(len(_BANDS))])
    steps_in_episode = 0

    def show(state: EnvState) -> None:
        print(f"\narm={state.ee} gripper={'closed' if state.gripper else 'open'}", file=stream_out)
        print(f"block={state.block} drawers={state.drawers} door={state.door}", file=stream_out)
        print(f"goal={goal.pos}", file=stream_out)
        for prim in Primitive:
            print(f"  [{int(prim)}] {prim.name.lower().replace('_', '-')}", file=stream_out)

    show(state)
    for line in stream_in:
        token = line.strip().lower()
        if token == "q":
            break
        if not token.isdigit() or not 0 <= int(token) < len(Primitive):
            print(f"enter a primitive index 0-{len(Primitive) - 1} or q", file=stream_out)
            continue
        action = int(token)
        out = step(state, action, goal)
        if out.infeasible:
            print(f"infeasible: {Primitive(action).name.lower()} (not recorded)", file=stream_out)
            continue
        records.append(PlayRecord(encode_state(state), action, encode_state(out.state)))
        state = out.state
        steps_in_episode += 1
        if out.done or steps_in_episode >= HORIZON:
            print("episode over, resetting", file=stream_out)
            state, goal = reset(rng, _BANDS[rng.integers(len(_BANDS))])
            steps_in_episode = 0
        show(state)
    return PlayDataset(
        records, {"rules": RULE_VERSION, "seed": seed, "size": len(records)}
    )
