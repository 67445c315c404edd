"""Multi-seed experiment execution with metrics, aggregates, and manifests."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..agents import MetricsSeries, default_config, train
from ..nets import load_checkpoint, save_checkpoint
from ..play import load_dataset
from ..prior import PriorModel, PriorTrainConfig, SelectionOperator, train_prior
from .config import ExperimentConfig

AGGREGATE_COLUMNS = (
    "step,success_mean,success_std,infeasible_mean,infeasible_std,loss_mean,epsilon"
)


def out_root() -> Path:
    return Path(os.environ.get("PLAYMASK_OUT_ROOT", "runs"))


def aggregate_csv_path(run_dir: Path) -> Path:
    return Path(run_dir) / "aggregate.csv"


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _prior_cache_path(cfg: ExperimentConfig, checksum: str, root: Path) -> Path:
    tag = f"{checksum[:16]}-s{cfg.prior_steps}-b{cfg.prior_batch}-lr{cfg.prior_lr!r}"
    return root / "priors" / f"{tag}.ckpt"


def trained_prior(cfg: ExperimentConfig, root: Path | None = None) -> PriorModel:
    """Train the prior for a dataset, or load it from the cache."""
    root = root or out_root()
    checksum = _sha256(cfg.dataset)
    cache = _prior_cache_path(cfg, checksum, root)
    if cache.exists():
        net, _, extra = load_checkpoint(cache)
        return PriorModel(
            net=net,
            train_steps=int(extra.get("train_steps", 0)),
            holdout_nll=[(int(extra.get("train_steps", 0)), float(extra.get("final_nll", "nan")))],
        )
    dataset = load_dataset(cfg.dataset)
    model = train_prior(
        dataset,
        PriorTrainConfig(
            batch=cfg.prior_batch, steps=cfg.prior_steps, lr=cfg.prior_lr, seed=0
        ),
    )
    cache.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(
        cache,
        model.net,
        extra={"train_steps": model.train_steps, "final_nll": repr(model.final_nll)},
    )
    return model


@dataclass
class RunResult:
    run_dir: Path
    seed_csvs: list[Path]
    series: list[MetricsSeries]

    def steps_to_success(self, threshold: float = 0.95) -> list[int | None]:
        return [s.steps_to_success(threshold) for s in self.series]


def _agent_config(cfg: ExperimentConfig):
    overrides = dict(
        update_every=cfg.update_every,
        lr=cfg.lr,
        initial_explore=cfg.resolved_initial_explore(),
        eps_floor=cfg.eps_floor,
        eval_cadence=cfg.eval_cadence,
        eval_episodes=cfg.eval_episodes,
        rho=cfg.rho,
    )
    if cfg.her_k >= 0:
        overrides["her_k"] = cfg.her_k
    if cfg.gamma > 0:
        overrides["gamma"] = cfg.gamma
    return default_config(cfg.algo, **overrides)


def run(cfg: ExperimentConfig, root: Path | None = None) -> RunResult:
    """Train every seed, write per-seed CSVs, an aggregate, and a manifest."""
    cfg.validate()
    root = root or out_root()
    run_dir = root / cfg.run_name()
    run_dir.mkdir(parents=True, exist_ok=True)

    selector = prior = dataset = None
    checksum = ""
    if cfg.algo in ("elfp", "soft-elfp", "prefill", "dqfd"):
        checksum = _sha256(cfg.dataset)
    if cfg.algo in ("elfp", "soft-elfp"):
        prior = trained_prior(cfg, root)
        selector = SelectionOperator(prior, rho=cfg.rho)
    if cfg.algo in ("prefill", "dqfd"):
        dataset = load_dataset(cfg.dataset)

    agent_cfg = _agent_config(cfg)
    budget = cfg.resolved_budget()
    seed_csvs: list[Path] = []
    series: list[MetricsSeries] = []
    started = time.time()
    for seed in cfg.seeds:
        metrics = train(
            cfg.algo,
            cfg.band,
            agent_cfg,
            seed=seed,
            budget=budget,
            selector=selector,
            prior=prior,
            dataset=dataset,
        )
        path = run_dir / f"seed{seed}.csv"
        metrics.to_csv(path)
        seed_csvs.append(path)
        series.append(metrics)

    _write_aggregate(aggregate_csv_path(run_dir), series)
    manifest = {
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()},
        "budget": budget,
        "seeds": list(cfg.seeds),
        "version": __version__,
        "dataset_sha256": checksum,
        "wall_clock_s": round(time.time() - started, 3),
    }
    with open(run_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return RunResult(run_dir, seed_csvs, series)


def _write_aggregate(path: Path, series: list[MetricsSeries]) -> None:
    steps = [r.step for r in series[0].rows]
    for s in series[1:]:
        if [r.step for r in s.rows] != steps:
            raise ValueError("seed series disagree on evaluation steps")
    with open(path, "w") as fh:
        fh.write(AGGREGATE_COLUMNS + "\n")
        for i, step_ in enumerate(steps):
            succ = np.array([s.rows[i].success_rate for s in series])
            inf = np.array([s.rows[i].cumulative_infeasible for s in series], dtype=float)
            loss = np.array([s.rows[i].mean_loss for s in series])
            loss = loss[~np.isnan(loss)]
            mean_loss = float(loss.mean()) if loss.size else float("nan")
            eps = series[0].rows[i].epsilon
            fh.write(
                f"{step_},{float(succ.mean())!r},{float(succ.std())!r},"
                f"{float(inf.mean())!r},{float(inf.std())!r},"
                f"{mean_loss!r},{eps!r}\n"
            )


def read_aggregate(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != AGGREGATE_COLUMNS:
            raise ValueError(f"{path}: unexpected aggregate header")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = AGGREGATE_COLUMNS.split(",")
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(cols)}
