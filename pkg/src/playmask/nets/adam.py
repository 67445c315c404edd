"""Adam updates with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DenseNet, Gradients


@dataclass
class AdamState:
    """First/second moment accumulators, shape-congruent with the net."""

    lr: float
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_net(cls, net: DenseNet, lr: float) -> "AdamState":
        params = net.param_arrays()
        return cls(
            lr=lr,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(net: DenseNet, grads: Gradients, state: AdamState) -> None:
    """One in-place Adam update on all parameters of `net`."""
    params = net.param_arrays()
    garrs = grads.arrays()
    if len(params) != len(state.m) or any(
        p.shape != g.shape for p, g in zip(params, garrs)
    ):
        raise ValueError("gradient shapes do not match the network")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    for p, g, m, v in zip(params, garrs, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
