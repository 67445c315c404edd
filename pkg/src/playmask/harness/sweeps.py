"""Parameter sweeps: threshold, dataset size, and relabeling ratio."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from ..env import HORIZON, N_ACTIONS, encode_state, reset, step
from ..prior import SelectionOperator
from .config import ExperimentConfig
from .run import out_root, run, trained_prior

SUCCESS_THRESHOLD = 0.95


def infeasible_pair_ratio(selector, seed: int, steps: int = 100_000) -> float:
    """Mean excluded-action fraction 1 - |alpha(s)|/|A| under the visitation
    of a uniform-over-alpha rollout policy."""
    rng = np.random.default_rng(seed)
    total = 0.0
    seen = 0
    while seen < steps:
        band = ("medium", "hard")[rng.integers(2)]
        state, goal = reset(rng, band)
        for _ in range(HORIZON):
            feas = selector.alpha(encode_state(state))
            total += 1.0 - len(feas) / N_ACTIONS
            seen += 1
            action = int(feas[rng.integers(len(feas))])
            out = step(state, action, goal)
            state = out.state
            if out.done or seen >= steps:
                break
    return total / steps


def _steps_to_threshold(result, budget: int) -> list[int]:
    """Per-seed first step reaching the threshold; censored at budget + 1."""
    out = []
    for s in result.series:
        reached = s.steps_to_success(SUCCESS_THRESHOLD)
        out.append(reached if reached is not None else budget + 1)
    return out


def sweep_rho(base: ExperimentConfig, rhos, root: Path | None = None) -> Path:
    """Train the masked agent across thresholds on one band.

    Writes rho, the infeasible-pair ratio under the induced selector, and
    per-seed steps to a 0.95 success rate (budget + 1 when censored).
    """
    if 0.0 not in [float(r) for r in rhos]:
        raise ValueError("the threshold list must include 0")
    root = root or out_root()
    budget = base.resolved_budget()
    prior = trained_prior(base, root)
    rows = []
    for rho in rhos:
        cfg = replace(base, rho=float(rho), name=f"{base.run_name()}-rho{rho}")
        selector = SelectionOperator(prior, rho=float(rho))
        ratio = infeasible_pair_ratio(selector, seed=0)
        result = run(cfg, root)
        for seed, steps in zip(cfg.seeds, _steps_to_threshold(result, budget)):
            rows.append((float(rho), ratio, seed, steps, int(steps > budget)))
    path = root / f"{base.run_name()}-rho-sweep.csv"
    with open(path, "w") as fh:
        fh.write("rho,infeasible_ratio,seed,steps_to_095,censored\n")
        for rho, ratio, seed, steps, censored in rows:
            fh.write(f"{rho!r},{ratio!r},{seed},{steps},{censored}\n")
    return path


def sweep_dataset_size(
    base: ExperimentConfig, datasets: dict[int, str], root: Path | None = None
) -> Path:
    """Masked agent vs buffer-prefilled baseline across play dataset sizes."""
    root = root or out_root()
    budget = base.resolved_budget()
    rows = []
    for size in sorted(datasets):
        for algo in ("elfp", "prefill"):
            cfg = replace(
                base,
                algo=algo,
                dataset=str(datasets[size]),
                name=f"{base.run_name()}-{algo}-n{size}",
            )
            result = run(cfg, root)
            for seed, steps in zip(cfg.seeds, _steps_to_threshold(result, budget)):
                rows.append((size, algo, seed, steps, int(steps > budget)))
    path = root / f"{base.run_name()}-datasize-sweep.csv"
    with open(path, "w") as fh:
        fh.write("dataset_size,algo,seed,steps_to_095,censored\n")
        for size, algo, seed, steps, censored in rows:
            fh.write(f"{size},{algo},{seed},{steps},{censored}\n")
    return path


def sweep_her(base: ExperimentConfig, ks=(0, 2, 4), root: Path | None = None) -> Path:
    """Masked agent with hindsight relabeling at several ratios, both bands."""
    root = root or out_root()
    rows = []
    for band in ("medium", "hard"):
        for k in ks:
            cfg = replace(
                base,
                algo="elfp",
                band=band,
                her_k=int(k),
                name=f"{base.run_name()}-her{k}-{band}",
            )
            budget = cfg.resolved_budget()
            result = run(cfg, root)
            for seed, steps in zip(cfg.seeds, _steps_to_threshold(result, budget)):
                rows.append((band, int(k), seed, steps, int(steps > budget)))
    path = root / f"{base.run_name()}-her-sweep.csv"
    with open(path, "w") as fh:
        fh.write("band,k,seed,steps_to_095,censored\n")
        for band, k, seed, steps, censored in rows:
            fh.write(f"{band},{k},{seed},{steps},{censored}\n")
    return path
