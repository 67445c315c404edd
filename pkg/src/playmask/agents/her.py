"""Hindsight goal relabeling with the future strategy."""

from __future__ import annotations

import numpy as np

from ..env.core import SUCCESS_TOL
from .replay import Transition


def _achieved(sp: np.ndarray) -> np.ndarray:
    return sp[4:7]  # block position slice of the encoded state


def _sparse_reward(block: np.ndarray, goal: np.ndarray) -> float:
    return 1.0 if np.abs(block - goal).sum() < SUCCESS_TOL else 0.0


def relabeled_only(episode: list[Transition], k: int, rng: np.random.Generator) -> list[Transition]:
    """The k hindsight copies per transition, without the originals.

    Future indices are drawn strictly after the transition when possible;
    the final transition relabels onto its own outcome.
    """
    out: list[Transition] = []
    n = len(episode)
    for t in range(n):
        for _ in range(k):
            future = int(rng.integers(t + 1, n)) if t + 1 < n else t
            goal = _achieved(episode[future].sp).copy()
            r = _sparse_reward(_achieved(episode[t].sp), goal)
            out.append(
                Transition(
                    s=episode[t].s,
                    a=episode[t].a,
                    r=r,
                    sp=episode[t].sp,
                    g=goal,
                    done=r == 1.0,
                    demo=episode[t].demo,
                )
            )
    return out


def her_relabel(episode: list[Transition], k: int, rng: np.random.Generator) -> list[Transition]:
    """Originals plus k future-relabeled copies each, (k+1)x the input size."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return list(episode)
    relabels = relabeled_only(episode, k, rng)
    out: list[Transition] = []
    for t, tr in enumerate(episode):
        out.append(tr)
        out.extend(relabels[t * k : (t + 1) * k])
    return out
