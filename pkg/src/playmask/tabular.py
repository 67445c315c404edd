"""Exact verification of masked Q-learning on small finite MDPs.

Value iteration and its masked variant give exact optimal values; tabular
Q-learning restricted to per-state action subsets is checked against them.
The headline property: when a mask keeps at least one optimal action in
every state, the masked problem has the same optimal values and its greedy
policy is optimal in the unrestricted MDP. Mask-density sweeps then relate
the fraction of excluded pairs to the steps needed to reach near-optimal
policies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

_TIE_TOL = 1e-9


@dataclass
class TabularMDP:
    """Reward attaches to the current state: V(s) = R(s) + gamma max_a P V."""

    P: np.ndarray  # (nS, nA, nS), rows sum to 1
    R: np.ndarray  # (nS,), values in {0, 1}
    gamma: float
    rho0: np.ndarray  # (nS,) initial distribution

    def __post_init__(self):
        sums = self.P.sum(axis=2)
        if not np.allclose(sums, 1.0, atol=1e-12):
            raise ValueError("transition rows must sum to 1")
        if not np.all((self.R == 0) | (self.R == 1)):
            raise ValueError("rewards must be binary")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("discount must be in (0, 1)")

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def n_actions(self) -> int:
        return self.P.shape[1]


def full_mask(mdp: TabularMDP) -> np.ndarray:
    return np.ones((mdp.n_states, mdp.n_actions), dtype=bool)


def _check_mask(mdp: TabularMDP, mask: np.ndarray) -> None:
    if mask.shape != (mdp.n_states, mdp.n_actions):
        raise ValueError("mask shape does not match the MDP")
    if not mask.any(axis=1).all():
        raise ValueError("every state needs at least one allowed action")


def value_iteration(mdp: TabularMDP, tol: float = 1e-12):
    """Optimal values and a greedy policy (ties to the lowest action)."""
    return masked_value_iteration(mdp, full_mask(mdp), tol)


def masked_value_iteration(mdp: TabularMDP, mask: np.ndarray, tol: float = 1e-12):
    """Bellman iteration maximizing only over each state's allowed actions."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    _check_mask(mdp, mask)
    v = np.zeros(mdp.n_states)
    while True:
        q = mdp.R[:, None] + mdp.gamma * (mdp.P @ v)
        v_new = np.where(mask, q, -np.inf).max(axis=1)
        residual = np.abs(v_new - v).max()
        v = v_new
        if residual < tol:
            break
    q = mdp.R[:, None] + mdp.gamma * (mdp.P @ v)
    policy = np.where(mask, q, -np.inf).argmax(axis=1)
    return v, policy


def policy_evaluation(mdp: TabularMDP, policy: np.ndarray) -> np.ndarray:
    """Exact V_pi via the linear system (I - gamma P_pi) V = R."""
    p_pi = mdp.P[np.arange(mdp.n_states), policy]
    return np.linalg.solve(np.eye(mdp.n_states) - mdp.gamma * p_pi, mdp.R)


def optimal_actions(mdp: TabularMDP, tol: float = _TIE_TOL) -> np.ndarray:
    """Boolean (nS, nA) table of actions within tol of the optimal value."""
    v, _ = value_iteration(mdp)
    q = mdp.R[:, None] + mdp.gamma * (mdp.P @ v)
    return q >= v[:, None] - tol


def tabular_q_masked(
    mdp: TabularMDP,
    mask: np.ndarray,
    steps: int,
    seed: int,
    eps: float = 0.2,
    lr_power: float = 0.8,
    restart_every: int = 25,
) -> np.ndarray:
    """Masked Q-learning along trajectories with eps-greedy-over-mask behavior.

    Learning rates follow 1/(1 + visits)**lr_power per state-action pair.
    Entries outside the mask are never written and never read by the
    next-state maximum.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    _check_mask(mdp, mask)
    rng = np.random.default_rng(seed)
    n_s, n_a = mdp.n_states, mdp.n_actions
    q = np.zeros((n_s, n_a))
    visits = np.zeros((n_s, n_a))
    allowed = [np.flatnonzero(mask[s]) for s in range(n_s)]
    neg_masked = np.where(mask, 0.0, -np.inf)

    state = int(rng.choice(n_s, p=mdp.rho0))
    for t in range(steps):
        if restart_every and t % restart_every == 0 and t > 0:
            state = int(rng.choice(n_s, p=mdp.rho0))
        acts = allowed[state]
        if rng.random() < eps:
            action = int(acts[rng.integers(len(acts))])
        else:
            action = int(acts[np.argmax(q[state, acts])])
        nxt = int(rng.choice(n_s, p=mdp.P[state, action]))
        visits[state, action] += 1
        lr = 1.0 / (1.0 + visits[state, action]) ** lr_power
        target = mdp.R[state] + mdp.gamma * (q[nxt] + neg_masked[nxt]).max()
        q[state, action] += lr * (target - q[state, action])
        state = nxt
    return q


class TheoremResult(Enum):
    PASS = "pass"
    FAIL = "fail"
    VACUOUS = "vacuous"


def theorem_check(mdp: TabularMDP, mask: np.ndarray, tol: float = 1e-8) -> TheoremResult:
    """Masked and unmasked optima must coincide when the mask keeps an
    optimal action everywhere; reported vacuous when it does not."""
    _check_mask(mdp, mask)
    if not (mask & optimal_actions(mdp)).any(axis=1).all():
        return TheoremResult.VACUOUS
    v_star, _ = value_iteration(mdp)
    v_masked, pol_masked = masked_value_iteration(mdp, mask)
    if np.abs(v_masked - v_star).max() > tol:
        return TheoremResult.FAIL
    v_pol = policy_evaluation(mdp, pol_masked)
    if np.abs(v_pol - v_star).max() > tol:
        return TheoremResult.FAIL
    return TheoremResult.PASS


def random_mdp(
    seed: int, n_states: int, n_actions: int, gamma_range=(0.8, 0.95)
) -> TabularMDP:
    """Dense random transitions (normalized positive rows), sparse binary
    reward with at least one rewarding state, uniform start distribution."""
    if n_states < 2 or n_actions < 2:
        raise ValueError("need at least 2 states and 2 actions")
    rng = np.random.default_rng(seed)
    p = rng.random((n_states, n_actions, n_states)) + 1e-3
    p /= p.sum(axis=2, keepdims=True)
    r = np.zeros(n_states)
    n_rewarding = int(rng.integers(1, max(2, n_states // 4 + 1)))
    r[rng.choice(n_states, size=n_rewarding, replace=False)] = 1.0
    gamma = float(rng.uniform(*gamma_range))
    rho0 = np.full(n_states, 1.0 / n_states)
    return TabularMDP(P=p, R=r, gamma=gamma, rho0=rho0)


def optimal_preserving_mask(
    mdp: TabularMDP, extra_density: float, seed: int
) -> np.ndarray:
    """All optimal actions, plus each non-optimal one with prob extra_density."""
    if not 0.0 <= extra_density <= 1.0:
        raise ValueError("density must be in [0, 1]")
    rng = np.random.default_rng(seed)
    optimal = optimal_actions(mdp)
    extra = rng.random(optimal.shape) < extra_density
    return optimal | extra


def infeasible_pair_ratio(
    mdp: TabularMDP, mask: np.ndarray, seed: int, steps: int = 20_000
) -> float:
    """Expected excluded-action fraction under a uniform-over-mask walk."""
    rng = np.random.default_rng(seed)
    allowed = [np.flatnonzero(mask[s]) for s in range(mdp.n_states)]
    state = int(rng.choice(mdp.n_states, p=mdp.rho0))
    total = 0.0
    for _ in range(steps):
        total += 1.0 - len(allowed[state]) / mdp.n_actions
        action = int(allowed[state][rng.integers(len(allowed[state]))])
        state = int(rng.choice(mdp.n_states, p=mdp.P[state, action]))
    return total / steps


@dataclass
class SweepRow:
    density: float
    ratio: float
    median_steps: float
    iqr: float
    censored: int
    steps_per_seed: list = field(default_factory=list)


def complexity_sweep(
    mdp_for_seed,
    densities,
    gap: float,
    seeds,
    max_steps: int = 200_000,
    check_every: int = 1000,
) -> list[SweepRow]:
    """Steps until the masked-greedy policy is within `gap` of optimal.

    `mdp_for_seed` maps a seed to a TabularMDP; runs that never converge
    within max_steps are censored at max_steps + check_every.
    """
    if len(set(densities)) < 4:
        raise ValueError("need at least 4 distinct densities")
    out = []
    for density in densities:
        steps_taken = []
        ratios = []
        censored = 0
        for seed in seeds:
            mdp = mdp_for_seed(seed)
            mask = optimal_preserving_mask(mdp, density, seed)
            v_star, _ = value_iteration(mdp)
            ratios.append(infeasible_pair_ratio(mdp, mask, seed))
            found = None
            q = np.zeros((mdp.n_states, mdp.n_actions))
            rng = np.random.default_rng(seed)
            visits = np.zeros_like(q)
            allowed = [np.flatnonzero(mask[s]) for s in range(mdp.n_states)]
            neg_masked = np.where(mask, 0.0, -np.inf)
            state = int(rng.choice(mdp.n_states, p=mdp.rho0))
            for t in range(max_steps):
                if t % 25 == 0 and t > 0:
                    state = int(rng.choice(mdp.n_states, p=mdp.rho0))
                acts = allowed[state]
                if rng.random() < 0.2:
                    action = int(acts[rng.integers(len(acts))])
                else:
                    action = int(acts[np.argmax(q[state, acts])])
                nxt = int(rng.choice(mdp.n_states, p=mdp.P[state, action]))
                visits[state, action] += 1
                lr = 1.0 / (1.0 + visits[state, action]) ** 0.8
                target = mdp.R[state] + mdp.gamma * (q[nxt] + neg_masked[nxt]).max()
                q[state, action] += lr * (target - q[state, action])
                state = nxt
                if (t + 1) % check_every == 0:
                    greedy = (q + neg_masked).argmax(axis=1)
                    if np.abs(policy_evaluation(mdp, greedy) - v_star).max() <= gap:
                        found = t + 1
                        break
            if found is None:
                censored += 1
                found = max_steps + check_every
            steps_taken.append(found)
        arr = np.array(steps_taken, dtype=float)
        out.append(
            SweepRow(
                density=float(density),
                ratio=float(np.mean(ratios)),
                median_steps=float(np.median(arr)),
                iqr=float(np.percentile(arr, 75) - np.percentile(arr, 25)),
                censored=censored,
                steps_per_seed=steps_taken,
            )
        )
    return out


def sweep_to_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w") as fh:
        fh.write("density,ratio,median_steps,iqr,censored\n")
        for r in rows:
            fh.write(f"{r.density!r},{r.ratio!r},{r.median_steps!r},{r.iqr!r},{r.censored}\n")


def spearman(x, y) -> float:
    """Rank correlation with average ranks on ties."""
    def ranks(v):
        v = np.asarray(v, dtype=float)
        order = np.argsort(v, kind="stable")
        r = np.empty(len(v))
        i = 0
        while i < len(v):
            j = i
            while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
                j += 1
            r[order[i : j + 1]] = (i + j) / 2.0 + 1.0
            i = j + 1
        return r

    rx, ry = ranks(x), ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    if denom == 0:
        return float("nan")
    return float((rx * ry).sum() / denom)
