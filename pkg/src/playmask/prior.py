"""Categorical behavioral prior over primitives, learned from play data.

The prior is a dense net mapping the 11-dim state to a softmax over the ten
primitives, fit by negative log-likelihood on play records. A threshold
turns it into a per-state feasible-action set: keep every primitive whose
probability strictly exceeds the threshold, falling back to the argmax
singleton if that empties the set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import (
    HORIZON,
    N_ACTIONS,
    decode_state,
    encode_state,
    feasible_any_goal,
    reset,
    step,
)
from .nets import AdamState, DenseNet, adam_step, nll_batch_loss_and_grad
from .nets.backend import kernels

PRIOR_LAYERS = [11, 200, 200, 10]


@dataclass
class PriorTrainConfig:
    batch: int = 500
    steps: int = 100_000
    lr: float = 1e-3
    holdout_frac: float = 0.1
    eval_every: int = 1000
    seed: int = 0


@dataclass
class PriorModel:
    net: DenseNet
    train_steps: int = 0
    holdout_nll: list[tuple[int, float]] = field(default_factory=list)

    @property
    def final_nll(self) -> float:
        return self.holdout_nll[-1][1] if self.holdout_nll else float("nan")


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    e = np.exp(z)
    return e / e.sum()


def probs(model: PriorModel, state_vec: np.ndarray) -> np.ndarray:
    """Probability vector over the ten primitives for one encoded state."""
    return _softmax(kernels.mlp_forward(model.net.weights, model.net.biases, np.ascontiguousarray(state_vec, dtype=np.float64)))


def _holdout_nll(net: DenseNet, xs: np.ndarray, labels: np.ndarray) -> float:
    from .nets.dense import _softmax as softmax_rows, forward_batch

    p = softmax_rows(forward_batch(net, xs))
    return float(-np.log(p[np.arange(len(labels)), labels]).mean())


def train_prior(dataset, cfg: PriorTrainConfig | None = None) -> PriorModel:
    """Minimize NLL with Adam on uniform mini-batches; track held-out NLL."""
    cfg = cfg or PriorTrainConfig()
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    states, actions, _ = dataset.arrays()
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(dataset))
    n_hold = max(1, int(len(dataset) * cfg.holdout_frac))
    hold, train = order[:n_hold], order[n_hold:]
    if len(train) < cfg.batch:
        raise ValueError(
            f"training split of {len(train)} records is smaller than one batch ({cfg.batch})"
        )
    xs_train, ys_train = states[train], actions[train]
    xs_hold, ys_hold = states[hold], actions[hold]

    net = DenseNet.create(PRIOR_LAYERS, rng)
    adam = AdamState.for_net(net, lr=cfg.lr)
    history = [(0, _holdout_nll(net, xs_hold, ys_hold))]
    for step_i in range(1, cfg.steps + 1):
        idx = rng.integers(len(xs_train), size=cfg.batch)
        _, grads = nll_batch_loss_and_grad(net, xs_train[idx], ys_train[idx])
        adam_step(net, grads, adam)
        if step_i % cfg.eval_every == 0 or step_i == cfg.steps:
            history.append((step_i, _holdout_nll(net, xs_hold, ys_hold)))
    return PriorModel(net=net, train_steps=cfg.steps, holdout_nll=history)


def alpha_from_probs(p: np.ndarray, rho: float) -> tuple[int, ...]:
    """Indices with probability strictly above rho; argmax singleton if none."""
    kept = tuple(int(i) for i in np.flatnonzero(p > rho))
    if kept:
        return kept
    return (int(np.argmax(p)),)


def memoized_probs(model: PriorModel):
    """Per-state probability lookup with caching, for tight loops."""
    cache: dict[bytes, np.ndarray] = {}

    def lookup(state_vec: np.ndarray) -> np.ndarray:
        key = state_vec.tobytes()
        p = cache.get(key)
        if p is None:
            p = probs(model, state_vec)
            cache[key] = p
        return p

    return lookup


class SelectionOperator:
    """Thresholded feasible-set map built on a trained prior.

    Goal-independent and pure; results are memoized per encoded state since
    the environment only ever visits a few thousand distinct states.
    """

    def __init__(self, model: PriorModel, rho: float = 0.01):
        if not 0.0 <= rho < 1.0:
            raise ValueError("rho must be in [0, 1)")
        self.model = model
        self.rho = rho
        self._cache: dict[bytes, tuple[int, ...]] = {}
        self._mask_cache: dict[bytes, np.ndarray] = {}

    def alpha(self, state_vec: np.ndarray) -> tuple[int, ...]:
        key = state_vec.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            hit = alpha_from_probs(probs(self.model, state_vec), self.rho)
            self._cache[key] = hit
        return hit

    def alpha_mask(self, state_vec: np.ndarray) -> np.ndarray:
        """Boolean (N_ACTIONS,) view of alpha; cached per state."""
        key = state_vec.tobytes()
        hit = self._mask_cache.get(key)
        if hit is None:
            hit = np.zeros(N_ACTIONS, dtype=bool)
            hit[list(self.alpha(state_vec))] = True
            self._mask_cache[key] = hit
        return hit


class FullSelector:
    """Selection operator admitting every primitive (the unmasked agent)."""

    rho = 0.0
    _all = tuple(range(N_ACTIONS))
    _all_mask = np.ones(N_ACTIONS, dtype=bool)

    def alpha(self, state_vec: np.ndarray) -> tuple[int, ...]:
        return self._all

    def alpha_mask(self, state_vec: np.ndarray) -> np.ndarray:
        return self._all_mask


class OracleSelector:
    """Goal-free ground-truth selector, for calibration tests."""

    def alpha(self, state_vec: np.ndarray) -> tuple[int, ...]:
        return tuple(sorted(int(a) for a in feasible_any_goal(decode_state(state_vec))))


def prior_quality(
    selector, n_states: int, seed: int, bands=("medium", "hard")
) -> tuple[float, float, float]:
    """(recall, precision, attempted-infeasible rate) over visited states.

    States are gathered by rolling a uniform-over-selected-set policy from
    band resets, mirroring the visitation the selector sees in training.
    Recall and precision compare the selected set against the goal-free
    feasible oracle; the attempted-infeasible rate is the fraction of
    executed choices the environment rejects.
    """
    if n_states < 1:
        raise ValueError("need at least one state")
    rng = np.random.default_rng(seed)
    recalls, precisions = [], []
    attempts = infeasible = 0
    while len(recalls) < n_states:
        band = bands[rng.integers(len(bands))]
        state, goal = reset(rng, band)
        for _ in range(HORIZON):
            vec = encode_state(state)
            chosen = selector.alpha(vec)
            truth = feasible_any_goal(state)
            inter = sum(1 for a in chosen if a in truth)
            recalls.append(inter / len(truth))
            precisions.append(inter / len(chosen))
            action = int(chosen[rng.integers(len(chosen))])
            out = step(state, action, goal)
            attempts += 1
            infeasible += out.infeasible
            state = out.state
            if out.done or len(recalls) >= n_states:
                break
    return (
        float(np.mean(recalls)),
        float(np.mean(precisions)),
        infeasible / attempts,
    )
