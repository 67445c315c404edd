"""Shared training loop, evaluation protocol, and metrics series.

One loop serves all agents; they differ only in the selector used for
acting and backups, in buffer prefilling, and in the update rule. Policies
are evaluated greedily over 50 fresh episodes at a fixed cadence; evaluation
uses its own random stream and never touches the buffer or the exploration
schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..env import encode_state, reset, step
from ..nets.backend import kernels
from ..prior import FullSelector, memoized_probs
from .qlearn import (
    QEnsemble,
    _forward_batch,
    _stable_softmax,
    act_elfp,
    act_soft_elfp,
    dqfd_step,
    td_step,
)
from .her import relabeled_only
from .prefill import prefill
from .replay import ReplayBuffer, Transition

ALGORITHMS = ("elfp", "ddqn", "her", "prefill", "dqfd", "soft-elfp")


@dataclass
class AgentConfig:
    gamma: float = 0.97
    lr: float = 1e-4
    batch: int = 256
    eps0: float = 0.5
    eps_decay: float = 5e-5
    eps_floor: float = 0.0
    rho: float = 0.01
    target_retention: float = 0.995
    horizon: int = 100
    initial_explore: int = 2000
    train_after: int = 1000
    buffer_capacity: int = 1_000_000
    update_every: int = 1
    her_k: int = 0
    eval_cadence: int = 2500
    eval_episodes: int = 50
    margin: float = 0.05
    margin_weight: float = 1e-3
    l2_weight: float = 1e-5
    # Rewards are {0,1} and terminal, so true action values live in [0, 1];
    # clipping TD targets to that interval guards against extrapolation
    # drift in rarely visited corners of the state space.
    clip_targets: bool = True


def default_config(algo: str, **overrides) -> AgentConfig:
    """Shared hyperparameters with the per-agent tuned deviations applied."""
    kw: dict = {}
    if algo == "her":
        kw["her_k"] = 4
    if algo in ("prefill", "dqfd"):
        kw["gamma"] = 0.95
    kw.update(overrides)
    return AgentConfig(**kw)


@dataclass
class MetricsRow:
    step: int
    success_rate: float
    cumulative_infeasible: int
    mean_loss: float
    epsilon: float


@dataclass
class MetricsSeries:
    rows: list[MetricsRow] = field(default_factory=list)

    COLUMNS = "step,success_rate,cumulative_infeasible,mean_loss,epsilon"

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.COLUMNS + "\n")
            for r in self.rows:
                fh.write(
                    f"{r.step},{r.success_rate!r},{r.cumulative_infeasible},"
                    f"{r.mean_loss!r},{r.epsilon!r}\n"
                )

    @classmethod
    def from_csv(cls, path) -> "MetricsSeries":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header != cls.COLUMNS:
                raise ValueError(f"{path}: unexpected metrics header {header!r}")
            for line in fh:
                step, sr, ci, ml, eps = line.strip().split(",")
                rows.append(
                    MetricsRow(int(step), float(sr), int(ci), float(ml), float(eps))
                )
        return cls(rows)

    def steps_to_success(self, threshold: float = 0.95) -> int | None:
        """First evaluation step reaching the threshold, None if never."""
        for r in self.rows:
            if r.success_rate >= threshold:
                return r.step
        return None


def evaluate(algo, ens: QEnsemble, selector, prior_probs, band, cfg, rng) -> float:
    """Mean success of the greedy policy over fresh episodes, batched."""
    episodes = cfg.eval_episodes
    pairs = [reset(rng, band) for _ in range(episodes)]
    states = [p[0] for p in pairs]
    goal_vecs = [np.asarray(p[1].pos) for p in pairs]
    goals = [p[1] for p in pairs]
    done = [False] * episodes
    for _ in range(cfg.horizon):
        active = [i for i in range(episodes) if not done[i]]
        if not active:
            break
        vecs = [encode_state(states[i]) for i in active]
        xs = np.concatenate(
            [np.stack(vecs), np.stack([goal_vecs[i] for i in active])], axis=1
        )
        q = _forward_batch(ens.q1, xs)
        for row, i in enumerate(active):
            if algo == "soft-elfp":
                action = int(np.argmax(_stable_softmax(q[row]) * prior_probs(vecs[row])))
            else:
                feas = selector.alpha(vecs[row])
                action = kernels.argmax_over(
                    np.ascontiguousarray(q[row]), np.asarray(feas, dtype=np.int64)
                )
            out = step(states[i], action, goals[i])
            states[i] = out.state
            if out.done:
                done[i] = True
    return sum(done) / episodes


def train(
    algo: str,
    band: str,
    cfg: AgentConfig,
    seed: int,
    budget: int,
    selector=None,
    prior=None,
    dataset=None,
    action_log: list | None = None,
) -> MetricsSeries:
    """Run one agent for `budget` environment steps; deterministic per seed."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    if algo in ("elfp",) and selector is None:
        raise ValueError("elfp needs a selection operator")
    if algo == "soft-elfp" and prior is None:
        raise ValueError("soft-elfp needs a prior model")
    if algo in ("prefill", "dqfd") and dataset is None:
        raise ValueError(f"{algo} needs a play dataset")
    if budget < 1:
        raise ValueError("budget must be >= 1")

    children = np.random.SeedSequence(seed).spawn(5)
    rng_env = np.random.default_rng(children[0])
    rng_init = np.random.default_rng(children[1])
    rng_batch = np.random.default_rng(children[2])
    rng_eval = np.random.default_rng(children[3])
    rng_prefill = np.random.default_rng(children[4])

    act_selector = selector if algo == "elfp" else FullSelector()
    backup_selector = act_selector if algo == "elfp" else FullSelector()
    prior_probs = memoized_probs(prior) if algo == "soft-elfp" else None

    ens = QEnsemble.create(rng_init, cfg.lr)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    if algo in ("prefill", "dqfd"):
        prefill(buffer, dataset, band, rng_prefill, demo=algo == "dqfd")

    state, goal = reset(rng_env, band)
    g_vec = np.asarray(goal.pos)
    episode: list[Transition] = []
    ep_len = 0
    cum_infeasible = 0
    losses: list[float] = []
    series = MetricsSeries()

    for t in range(budget):
        s_vec = encode_state(state)
        if t < cfg.initial_explore:
            eps_now = 1.0
            if algo == "soft-elfp":
                p = prior_probs(s_vec)
                action = int(rng_env.choice(len(p), p=p))
            else:
                feas = act_selector.alpha(s_vec)
                action = int(feas[rng_env.integers(len(feas))])
        else:
            eps_now = max(cfg.eps0 * math.exp(-cfg.eps_decay * t), cfg.eps_floor)
            if algo == "soft-elfp":
                action = act_soft_elfp(ens, prior_probs, s_vec, g_vec, eps_now, rng_env)
            else:
                action = act_elfp(ens, act_selector, s_vec, g_vec, eps_now, rng_env)
        if action_log is not None:
            action_log.append((s_vec.tobytes(), action))

        out = step(state, action, goal)
        cum_infeasible += int(out.infeasible)
        tr = Transition(
            s_vec, action, float(out.reward), encode_state(out.state), g_vec, out.done
        )
        buffer.insert_transition(tr)
        if cfg.her_k > 0:
            episode.append(tr)
        ep_len += 1
        state = out.state

        if out.done or ep_len >= cfg.horizon:
            if cfg.her_k > 0 and episode:
                for extra in relabeled_only(episode, cfg.her_k, rng_env):
                    buffer.insert_transition(extra)
                episode = []
            state, goal = reset(rng_env, band)
            g_vec = np.asarray(goal.pos)
            ep_len = 0

        if t >= cfg.train_after and t % cfg.update_every == 0 and buffer.size >= cfg.batch:
            step_fn = dqfd_step if algo == "dqfd" else td_step
            loss = step_fn(ens, buffer, backup_selector, cfg, rng_batch)
            if loss is not None:
                losses.append(loss)

        if (t + 1) % cfg.eval_cadence == 0:
            success = evaluate(algo, ens, act_selector, prior_probs, band, cfg, rng_eval)
            mean_loss = float(np.mean(losses)) if losses else float("nan")
            series.rows.append(
                MetricsRow(t + 1, success, cum_infeasible, mean_loss, eps_now)
            )
            losses = []

    return series
