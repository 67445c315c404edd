"""Dense rectifier networks with hand-written backward passes.

Everything is float64. Layers are fully connected, hidden layers use the
rectifier, and the final layer emits raw scores (logits for the categorical
prior, action values for the Q-networks). The backward passes are exact and
are validated against central finite differences in `finite_diff_check`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels


@dataclass
class DenseNet:
    """Fully connected net: weights[l] has shape (sizes[l+1], sizes[l])."""

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def create(cls, layer_sizes: list[int], rng: np.random.Generator) -> "DenseNet":
        """Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
        if len(layer_sizes) < 2 or any(n <= 0 for n in layer_sizes):
            raise ValueError(f"bad layer sizes {layer_sizes}")
        weights, biases = [], []
        for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = np.sqrt(6.0 / (n_in + n_out))
            weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
            biases.append(np.zeros(n_out))
        return cls(list(layer_sizes), weights, biases)

    @classmethod
    def zeros(cls, layer_sizes: list[int]) -> "DenseNet":
        weights = [
            np.zeros((n_out, n_in))
            for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:])
        ]
        biases = [np.zeros(n) for n in layer_sizes[1:]]
        return cls(list(layer_sizes), weights, biases)

    def copy(self) -> "DenseNet":
        return DenseNet(
            list(self.layer_sizes),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def param_arrays(self) -> list[np.ndarray]:
        """All parameter arrays, layer order, weights before biases."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


@dataclass
class Gradients:
    """Per-parameter gradients, shape-congruent with the owning net."""

    d_weights: list[np.ndarray]
    d_biases: list[np.ndarray]

    @classmethod
    def zeros_like(cls, net: DenseNet) -> "Gradients":
        return cls(
            [np.zeros_like(w) for w in net.weights],
            [np.zeros_like(b) for b in net.biases],
        )

    def arrays(self) -> list[np.ndarray]:
        out = []
        for dw, db in zip(self.d_weights, self.d_biases):
            out.append(dw)
            out.append(db)
        return out


def forward(net: DenseNet, x: np.ndarray) -> np.ndarray:
    """Single-sample forward pass; dispatches to the compiled kernel."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != net.layer_sizes[0]:
        raise ValueError(
            f"input of length {x.shape} does not match layer size {net.layer_sizes[0]}"
        )
    return kernels.mlp_forward(net.weights, net.biases, x)


def forward_batch(net: DenseNet, xs: np.ndarray) -> np.ndarray:
    """Batched forward pass, (B, n_in) -> (B, n_out)."""
    if xs.ndim != 2 or xs.shape[1] != net.layer_sizes[0]:
        raise ValueError(f"batch shape {xs.shape} does not match net input")
    h = xs
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w.T + b, 0.0)
    return h @ net.weights[-1].T + net.biases[-1]


def _forward_batch_cached(net, xs):
    """Forward pass keeping post-activation values for the backward pass."""
    acts = [xs]
    h = xs
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w.T + b, 0.0)
        acts.append(h)
    return h @ net.weights[-1].T + net.biases[-1], acts


def _backward_from_output(net, acts, d_out):
    """Backpropagate d(loss)/d(output) of shape (B, n_out) to all parameters."""
    grads = Gradients([None] * net.n_layers, [None] * net.n_layers)
    delta = d_out
    for layer in range(net.n_layers - 1, -1, -1):
        grads.d_weights[layer] = delta.T @ acts[layer]
        grads.d_biases[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ net.weights[layer]) * (acts[layer] > 0.0)
    return grads


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def nll_batch_loss_and_grad(net, xs, labels):
    """Mean negative log-likelihood of integer labels under softmax outputs."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= net.layer_sizes[-1]:
        raise ValueError("label outside the output dimension")
    logits, acts = _forward_batch_cached(net, xs)
    p = _softmax(logits)
    n = xs.shape[0]
    rows = np.arange(n)
    loss = float(-np.log(p[rows, labels]).mean())
    d_out = p
    d_out[rows, labels] -= 1.0
    d_out /= n
    return loss, _backward_from_output(net, acts, d_out)


def nll_loss_and_grad(net, x, label: int):
    """Single-sample softmax cross-entropy: -log softmax(f(x))[label]."""
    return nll_batch_loss_and_grad(net, np.atleast_2d(x), np.array([label]))


def td_batch_loss_and_grad(net, xs, actions, targets):
    """Mean squared error between targets and the chosen-action outputs.

    Gradients flow only through the selected output of each sample.
    """
    actions = np.asarray(actions)
    if actions.min() < 0 or actions.max() >= net.layer_sizes[-1]:
        raise ValueError("action outside the output dimension")
    out, acts = _forward_batch_cached(net, xs)
    n = xs.shape[0]
    rows = np.arange(n)
    err = out[rows, actions] - np.asarray(targets, dtype=np.float64)
    loss = float((err**2).mean())
    d_out = np.zeros_like(out)
    d_out[rows, actions] = 2.0 * err / n
    return loss, _backward_from_output(net, acts, d_out)


def td_loss_and_grad(net, x, action: int, target: float):
    """Single-sample squared error (target - f(x)[action])**2."""
    return td_batch_loss_and_grad(net, np.atleast_2d(x), [action], [target])


def _loss_only(net, loss_kind, x, label, target):
    if loss_kind == "nll":
        logits = forward_batch(net, np.atleast_2d(x))[0]
        p = _softmax(logits)
        return -np.log(p[label])
    if loss_kind == "td":
        return (forward_batch(net, np.atleast_2d(x))[0][label] - target) ** 2
    raise ValueError(f"unknown loss kind {loss_kind!r}")


def finite_diff_check(
    net: DenseNet,
    loss_kind: str,
    trials: int,
    rng: np.random.Generator,
    step: float = 1e-5,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Where the reference magnitude is below 1e-8 the absolute error is used,
    so zero nets and zero inputs stay well-defined.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = 0.0
    for _ in range(trials):
        x = rng.normal(size=net.layer_sizes[0])
        label = int(rng.integers(net.layer_sizes[-1]))
        target = float(rng.normal())
        if loss_kind == "nll":
            _, grads = nll_loss_and_grad(net, x, label)
        else:
            _, grads = td_loss_and_grad(net, x, label, target)
        for param, grad in zip(net.param_arrays(), grads.arrays()):
            flat_p = param.reshape(-1)
            flat_g = grad.reshape(-1)
            for i in range(flat_p.size):
                orig = flat_p[i]
                flat_p[i] = orig + step
                hi = _loss_only(net, loss_kind, x, label, target)
                flat_p[i] = orig - step
                lo = _loss_only(net, loss_kind, x, label, target)
                flat_p[i] = orig
                numeric = (hi - lo) / (2.0 * step)
                denom = max(abs(numeric), abs(flat_g[i]))
                err = abs(numeric - flat_g[i])
                if denom >= 1e-8:
                    err /= denom
                worst = max(worst, err)
    return worst
