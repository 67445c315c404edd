"""Experiment configuration and its flat key=value file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

# Desk-scale defaults, calibrated on the symbolic desk so that the masked
# agent converges within CPU-minutes while curve orderings match the
# reference protocol: evaluation of 50 greedy episodes every 2500 steps.
MEDIUM_BUDGET = 200_000
HARD_BUDGET = 500_000


@dataclass
class ExperimentConfig:
    algo: str = "elfp"
    band: str = "medium"
    dataset: str = ""  # play dataset path; required by prior-using agents
    rho: float = 0.01
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    budget: int = 0  # 0 means the band default
    eval_cadence: int = 2500
    eval_episodes: int = 50
    update_every: int = 3
    lr: float = 1e-3
    initial_explore: int = -1  # -1 means the band default (20k medium, 30k hard)
    eps_floor: float = 0.05
    her_k: int = -1  # -1 means the algorithm default
    gamma: float = -1.0  # -1 means the algorithm default
    prior_steps: int = 100_000
    prior_batch: int = 500
    prior_lr: float = 1e-3
    name: str = ""

    def resolved_budget(self) -> int:
        if self.budget > 0:
            return self.budget
        return MEDIUM_BUDGET if self.band == "medium" else HARD_BUDGET

    def resolved_initial_explore(self) -> int:
        if self.initial_explore >= 0:
            return self.initial_explore
        return 20_000 if self.band == "medium" else 30_000

    def run_name(self) -> str:
        return self.name or f"{self.algo}-{self.band}"

    def validate(self) -> None:
        from ..agents import ALGORITHMS
        from ..env import BANDS

        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.band not in BANDS:
            raise ValueError(f"unknown band {self.band!r}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        needs_data = self.algo in ("elfp", "soft-elfp", "prefill", "dqfd")
        if needs_data and not self.dataset:
            raise ValueError(f"{self.algo} requires a play dataset")
        if needs_data and not Path(self.dataset).exists():
            raise FileNotFoundError(f"dataset not found: {self.dataset}")


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        for key, value in asdict(cfg).items():
            if key == "seeds":
                value = " ".join(str(s) for s in value)
            fh.write(f"{key} = {value}\n")


def load_config(path) -> ExperimentConfig:
    known = {f.name: f for f in fields(ExperimentConfig)}
    kwargs = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "seeds":
                kwargs[key] = tuple(int(tok) for tok in value.split())
            else:
                typ = known[key].type
                if typ in ("int", int):
                    kwargs[key] = int(value)
                elif typ in ("float", float):
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = value
    return ExperimentConfig(**kwargs)
