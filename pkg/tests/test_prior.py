import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from playmask.play import PlayDataset, PlayRecord
from playmask.prior import (
    FullSelector,
    OracleSelector,
    PriorModel,
    PriorTrainConfig,
    SelectionOperator,
    alpha_from_probs,
    memoized_probs,
    prior_quality,
    probs,
    train_prior,
)
from playmask.nets import DenseNet


def constant_label_dataset(n=800, label=3):
    rng = np.random.default_rng(0)
    records = []
    for _ in range(n):
        s = rng.uniform(0, 1, size=11)
        records.append(PlayRecord(s, label, s))
    return PlayDataset(records, {"size": n})


def test_degenerate_dataset_is_memorized():
    dataset = constant_label_dataset()
    model = train_prior(dataset, PriorTrainConfig(batch=100, steps=400, seed=0))
    for rec in dataset.records[:20]:
        assert probs(model, rec.state)[3] > 0.95


def test_probs_sum_to_one(small_prior, rng):
    for _ in range(20):
        p = probs(small_prior, rng.uniform(0, 1, size=11))
        assert p.shape == (10,)
        assert np.all(p >= 0)
        assert abs(p.sum() - 1.0) < 1e-9


def test_zero_net_gives_uniform_probs():
    model = PriorModel(net=DenseNet.zeros([11, 200, 200, 10]))
    p = probs(model, np.full(11, 0.5))
    assert np.allclose(p, 0.1, atol=1e-12)


def test_training_beats_uniform_baseline(small_prior):
    assert small_prior.final_nll < math.log(10.0)


def test_holdout_descends_from_initialization(small_prior):
    history = dict(small_prior.holdout_nll)
    assert small_prior.final_nll < history[0]


def test_train_prior_rejects_empty_and_tiny():
    with pytest.raises(ValueError):
        train_prior(PlayDataset([], {}))
    with pytest.raises(ValueError, match="smaller than one batch"):
        train_prior(constant_label_dataset(200), PriorTrainConfig(batch=500, steps=10))


def test_alpha_threshold_is_strict():
    p = np.array([0.5, 0.3, 0.15, 0.04, 0.01, 0.0, 0.0, 0.0, 0.0, 0.0])
    assert alpha_from_probs(p, 0.01) == (0, 1, 2, 3)


def test_alpha_rho_zero_is_full_set(small_prior, rng):
    sel = SelectionOperator(small_prior, rho=0.0)
    for _ in range(10):
        assert sel.alpha(rng.uniform(0, 1, size=11)) == tuple(range(10))


def test_alpha_falls_back_to_argmax_singleton(small_prior, rng):
    sel = SelectionOperator(small_prior, rho=0.99)
    vec = rng.uniform(0, 1, size=11)
    chosen = sel.alpha(vec)
    assert chosen == (int(np.argmax(probs(small_prior, vec))),)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=10, max_size=10), st.floats(0, 0.5), st.floats(0, 0.5))
def test_alpha_monotone_in_rho(weights, rho_a, rho_b):
    p = np.array(weights)
    p /= p.sum()
    lo, hi = sorted((rho_a, rho_b))
    kept_hi = set(i for i in alpha_from_probs(p, hi) if p[i] > hi)
    kept_lo = set(alpha_from_probs(p, lo))
    assert kept_hi <= kept_lo


def test_selector_is_goal_free_and_cached(small_selector, rng):
    vec = rng.uniform(0, 1, size=11)
    assert small_selector.alpha(vec) == small_selector.alpha(vec.copy())
    mask = small_selector.alpha_mask(vec)
    assert tuple(np.flatnonzero(mask)) == small_selector.alpha(vec)


def test_oracle_selector_scores_perfectly():
    recall, precision, infeasible_rate = prior_quality(OracleSelector(), 300, seed=3)
    assert recall == 1.0
    assert precision == 1.0
    # go-goal feasibility depends on the episode's goal, which no
    # goal-independent selector can see; only that residue may execute
    assert infeasible_rate < 0.05


def test_full_selector_has_perfect_recall():
    recall, _, _ = prior_quality(FullSelector(), 200, seed=4)
    assert recall == 1.0


def test_trained_prior_quality(small_selector):
    recall, precision, infeasible_rate = prior_quality(small_selector, 500, seed=5)
    assert recall >= 0.9
    assert precision >= 0.9
    assert infeasible_rate <= 0.1


def test_memoized_probs_matches_direct(small_prior, rng):
    lookup = memoized_probs(small_prior)
    vec = rng.uniform(0, 1, size=11)
    assert np.array_equal(lookup(vec), probs(small_prior, vec))
    assert np.array_equal(lookup(vec), lookup(vec.copy()))
