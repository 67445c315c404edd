"""Goal-conditioned clipped double Q-learning restricted to feasible sets.

Two online nets and two targets over the concatenated state-goal input. TD
targets use each online net's argmax over the feasible set of the next
state, bootstrapped through the minimum of the two target nets; the
bootstrap is cut at terminal transitions. With a full-set selector this is
exactly the unmasked baseline agent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nets import AdamState, DenseNet, Gradients, adam_step
from ..nets.backend import kernels
from ..nets.dense import _backward_from_output, _forward_batch_cached

Q_LAYERS = [14, 128, 256, 10]


@dataclass
class QEnsemble:
    q1: DenseNet
    q2: DenseNet
    t1: DenseNet
    t2: DenseNet
    adam1: AdamState
    adam2: AdamState

    @classmethod
    def create(cls, rng: np.random.Generator, lr: float = 1e-4) -> "QEnsemble":
        q1 = DenseNet.create(Q_LAYERS, rng)
        q2 = DenseNet.create(Q_LAYERS, rng)
        return cls(
            q1=q1,
            q2=q2,
            t1=q1.copy(),  # targets start equal to the online nets
            t2=q2.copy(),
            adam1=AdamState.for_net(q1, lr),
            adam2=AdamState.for_net(q2, lr),
        )


def q_single(net: DenseNet, s_vec: np.ndarray, g_vec: np.ndarray) -> np.ndarray:
    """Action values for one (state, goal) pair."""
    return kernels.mlp_forward(
        net.weights, net.biases, np.ascontiguousarray(np.concatenate([s_vec, g_vec]))
    )


def _forward_batch(net: DenseNet, xs: np.ndarray) -> np.ndarray:
    h = xs
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w.T + b, 0.0)
    return h @ net.weights[-1].T + net.biases[-1]


def _forward_batch_multi(nets, xs: np.ndarray) -> np.ndarray:
    """Forward several same-shaped nets on one input batch: (K, B, out).

    One batched matmul per layer replaces K separate calls; the per-net
    results match the single-net path up to the last ulp.
    """
    k = len(nets)
    h = np.broadcast_to(xs, (k,) + xs.shape)
    n_layers = nets[0].n_layers
    for layer in range(n_layers):
        w = np.stack([net.weights[layer].T for net in nets])
        b = np.stack([net.biases[layer] for net in nets])
        h = np.matmul(h, w) + b[:, None, :]
        if layer < n_layers - 1:
            h = np.maximum(h, 0.0)
    return h


def _td_pair_step(ens, sg, actions, y1, y2):
    """Squared-error losses and gradients for both online nets at once."""
    k_nets = (ens.q1, ens.q2)
    acts = [np.broadcast_to(sg, (2,) + sg.shape)]
    h = acts[0]
    n_layers = ens.q1.n_layers
    for layer in range(n_layers - 1):
        w = np.stack([net.weights[layer].T for net in k_nets])
        b = np.stack([net.biases[layer] for net in k_nets])
        h = np.maximum(np.matmul(h, w) + b[:, None, :], 0.0)
        acts.append(h)
    w_last = np.stack([net.weights[-1].T for net in k_nets])
    b_last = np.stack([net.biases[-1] for net in k_nets])
    out = np.matmul(h, w_last) + b_last[:, None, :]

    n = sg.shape[0]
    rows = np.arange(n)
    targets = np.stack([y1, y2])
    err = out[:, rows, actions] - targets
    losses = (err**2).mean(axis=1)
    delta = np.zeros_like(out)
    delta[:, rows, actions] = 2.0 * err / n

    grads = [Gradients([None] * n_layers, [None] * n_layers) for _ in range(2)]
    for layer in range(n_layers - 1, -1, -1):
        dw = np.matmul(delta.transpose(0, 2, 1), acts[layer])
        db = delta.sum(axis=1)
        for j in range(2):
            grads[j].d_weights[layer] = dw[j]
            grads[j].d_biases[layer] = db[j]
        if layer > 0:
            w = np.stack([net.weights[layer] for net in k_nets])
            delta = np.matmul(delta, w) * (acts[layer] > 0.0)
    return float(losses[0]), float(losses[1]), grads[0], grads[1]


def act_elfp(ens: QEnsemble, selector, s_vec, g_vec, eps: float, rng) -> int:
    """Epsilon-greedy restricted to the selected feasible set."""
    feas = selector.alpha(s_vec)
    if eps > 0.0 and rng.random() < eps:
        return int(feas[rng.integers(len(feas))])
    q = q_single(ens.q1, s_vec, g_vec)
    return kernels.argmax_over(q, np.asarray(feas, dtype=np.int64))


def _stable_softmax(v: np.ndarray) -> np.ndarray:
    e = np.exp(v - v.max())
    return e / e.sum()


def act_soft_elfp(ens: QEnsemble, prior_probs, s_vec, g_vec, eps: float, rng) -> int:
    """Prior-weighted variant: explore by sampling the prior, exploit by
    maximizing softmax(Q) * prior."""
    p = prior_probs(s_vec)
    if eps > 0.0 and rng.random() < eps:
        return int(rng.choice(len(p), p=p))
    q = q_single(ens.q1, s_vec, g_vec)
    return int(np.argmax(_stable_softmax(q) * p))


def _feasible_mask(selector, sp: np.ndarray) -> np.ndarray:
    if hasattr(selector, "alpha_mask"):
        return np.stack([selector.alpha_mask(sp[i]) for i in range(sp.shape[0])])
    mask = np.zeros((sp.shape[0], Q_LAYERS[-1]), dtype=bool)
    for i in range(sp.shape[0]):
        mask[i, list(selector.alpha(sp[i]))] = True
    return mask


def masked_targets(ens: QEnsemble, batch: dict, selector, gamma: float):
    """Per-sample TD targets (y1, y2) with the next-state argmax masked."""
    spg = np.concatenate([batch["sp"], batch["g"]], axis=1)
    mask = _feasible_mask(selector, batch["sp"])
    neg = np.float64(-np.inf)
    q1n, q2n, t1n, t2n = _forward_batch_multi((ens.q1, ens.q2, ens.t1, ens.t2), spg)
    q1n = np.where(mask, q1n, neg)
    q2n = np.where(mask, q2n, neg)
    rows = np.arange(spg.shape[0])
    boot = gamma * (1.0 - batch["done"])
    a1 = q1n.argmax(axis=1)
    a2 = q2n.argmax(axis=1)
    y1 = batch["r"] + boot * np.minimum(t1n[rows, a1], t2n[rows, a1])
    y2 = batch["r"] + boot * np.minimum(t1n[rows, a2], t2n[rows, a2])
    return y1, y2


def soft_update(target: DenseNet, online: DenseNet, retention: float) -> None:
    """target <- retention * target + (1 - retention) * online."""
    for t_arr, o_arr in zip(target.param_arrays(), online.param_arrays()):
        t_arr *= retention
        t_arr += (1.0 - retention) * o_arr


def td_step(ens: QEnsemble, buffer, selector, cfg, rng) -> float | None:
    """One uniform batch, one Adam step per online net, soft target updates."""
    if buffer.size < cfg.batch:
        import warnings

        warnings.warn("replay buffer smaller than a batch; skipping update")
        return None
    batch = buffer.sample(rng, cfg.batch)
    y1, y2 = masked_targets(ens, batch, selector, cfg.gamma)
    if getattr(cfg, "clip_targets", False):
        np.clip(y1, 0.0, 1.0, out=y1)
        np.clip(y2, 0.0, 1.0, out=y2)
    sg = np.concatenate([batch["s"], batch["g"]], axis=1)
    loss1, loss2, grads1, grads2 = _td_pair_step(ens, sg, batch["a"], y1, y2)
    adam_step(ens.q1, grads1, ens.adam1)
    adam_step(ens.q2, grads2, ens.adam2)
    soft_update(ens.t1, ens.q1, cfg.target_retention)
    soft_update(ens.t2, ens.q2, cfg.target_retention)
    return 0.5 * (loss1 + loss2)


def _margin_contrib(q_out: np.ndarray, demo_rows: np.ndarray, a_demo: np.ndarray, margin: float):
    """Large-margin term on demonstration rows: value and output-gradient."""
    if demo_rows.size == 0:
        return 0.0, None
    q = q_out[demo_rows]
    adj = q + margin
    adj[np.arange(demo_rows.size), a_demo] -= margin
    a_hat = adj.argmax(axis=1)
    value = adj[np.arange(demo_rows.size), a_hat] - q[np.arange(demo_rows.size), a_demo]
    d_out = np.zeros_like(q_out)
    scale = 1.0 / demo_rows.size
    for k, row in enumerate(demo_rows):
        if a_hat[k] != a_demo[k]:
            d_out[row, a_hat[k]] += scale
            d_out[row, a_demo[k]] -= scale
    return float(value.mean()), d_out


def _dqfd_net_loss(net: DenseNet, sg, actions, targets, batch, cfg):
    """TD + large-margin (demo rows) + L2; returns (total, td, grads)."""
    out, acts = _forward_batch_cached(net, sg)
    n = sg.shape[0]
    rows = np.arange(n)
    err = out[rows, actions] - targets
    td = float((err**2).mean())
    d_out = np.zeros_like(out)
    d_out[rows, actions] = 2.0 * err / n

    demo_rows = np.flatnonzero(batch["demo"])
    margin_val, margin_d = _margin_contrib(
        out, demo_rows, batch["a"][demo_rows], cfg.margin
    )
    total = td + cfg.margin_weight * margin_val
    if margin_d is not None:
        d_out = d_out + cfg.margin_weight * margin_d

    grads = _backward_from_output(net, acts, d_out)
    l2 = 0.0
    for p, g in zip(net.param_arrays(), grads.arrays()):
        l2 += float((p**2).sum())
        g += 2.0 * cfg.l2_weight * p
    total += cfg.l2_weight * l2
    return total, td, grads


def dqfd_loss(ens: QEnsemble, batch: dict, selector_full, cfg) -> float:
    """Total loss of the demonstration agent on one batch (net 1)."""
    y1, _ = masked_targets(ens, batch, selector_full, cfg.gamma)
    sg = np.concatenate([batch["s"], batch["g"]], axis=1)
    total, _, _ = _dqfd_net_loss(ens.q1, sg, batch["a"], y1, batch, cfg)
    return total


def dqfd_step(ens: QEnsemble, buffer, selector_full, cfg, rng) -> float | None:
    """Like td_step but with margin and L2 terms; backups are unmasked."""
    if buffer.size < cfg.batch:
        import warnings

        warnings.warn("replay buffer smaller than a batch; skipping update")
        return None
    batch = buffer.sample(rng, cfg.batch)
    y1, y2 = masked_targets(ens, batch, selector_full, cfg.gamma)
    if getattr(cfg, "clip_targets", False):
        np.clip(y1, 0.0, 1.0, out=y1)
        np.clip(y2, 0.0, 1.0, out=y2)
    sg = np.concatenate([batch["s"], batch["g"]], axis=1)
    _, td1, grads1 = _dqfd_net_loss(ens.q1, sg, batch["a"], y1, batch, cfg)
    _, td2, grads2 = _dqfd_net_loss(ens.q2, sg, batch["a"], y2, batch, cfg)
    adam_step(ens.q1, grads1, ens.adam1)
    adam_step(ens.q2, grads2, ens.adam2)
    soft_update(ens.t1, ens.q1, cfg.target_retention)
    soft_update(ens.t2, ens.q2, cfg.target_retention)
    return 0.5 * (td1 + td2)
