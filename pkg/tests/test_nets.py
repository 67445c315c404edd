import math

import numpy as np
import pytest

from playmask.nets import (
    AdamState,
    DenseNet,
    adam_step,
    finite_diff_check,
    forward,
    forward_batch,
    load_checkpoint,
    nll_loss_and_grad,
    save_checkpoint,
    td_loss_and_grad,
)
from playmask.nets.backend import BACKEND_NAME


def naive_forward(net, x):
    """Straight-line re-implementation used as the oracle."""
    h = list(x)
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        out = []
        for o in range(w.shape[0]):
            acc = b[o]
            for i in range(w.shape[1]):
                acc += w[o, i] * h[i]
            if layer < net.n_layers - 1:
                acc = max(acc, 0.0)
            out.append(acc)
        h = out
    return np.array(h)


def test_forward_matches_naive_oracle(rng):
    for _ in range(100):
        sizes = [int(rng.integers(2, 7)) for _ in range(int(rng.integers(2, 5)))]
        net = DenseNet.create(sizes, rng)
        x = rng.normal(size=sizes[0])
        assert np.allclose(forward(net, x), naive_forward(net, x), atol=1e-10)
        assert np.allclose(forward_batch(net, x[None])[0], naive_forward(net, x), atol=1e-10)


def test_zero_weights_give_bias_chain(rng):
    net = DenseNet.zeros([3, 4, 2])
    net.biases[-1][:] = [0.5, -1.5]
    for _ in range(5):
        assert np.array_equal(forward(net, rng.normal(size=3)), [0.5, -1.5])


def test_identity_output_layer_has_no_activation():
    net = DenseNet.zeros([2, 2])
    net.weights[0][:] = np.eye(2)
    assert np.array_equal(forward(net, np.array([1.0, -2.0])), [1.0, -2.0])


def test_forward_rejects_wrong_length(rng):
    net = DenseNet.create([3, 2], rng)
    with pytest.raises(ValueError):
        forward(net, np.zeros(4))


def test_nll_uniform_logits():
    net = DenseNet.zeros([2, 3])  # all-zero logits for any input
    loss, grads = nll_loss_and_grad(net, np.array([0.3, -0.7]), 0)
    assert loss == pytest.approx(math.log(3.0), abs=1e-12)
    # d(loss)/d(logits) lands on the final bias: softmax minus one-hot
    assert np.allclose(grads.d_biases[-1], [-2 / 3, 1 / 3, 1 / 3])


def test_nll_saturated_label_has_near_zero_loss():
    net = DenseNet.zeros([1, 3])
    net.biases[-1][:] = [50.0, 0.0, 0.0]
    loss, _ = nll_loss_and_grad(net, np.array([0.0]), 0)
    assert loss < 1e-12


def test_nll_rejects_bad_label(rng):
    net = DenseNet.create([2, 3], rng)
    with pytest.raises(ValueError):
        nll_loss_and_grad(net, np.zeros(2), 3)


def test_td_fixed_point_and_direct_value(rng):
    net = DenseNet.create([3, 4, 2], rng)
    x = rng.normal(size=3)
    pred = forward(net, x)[1]
    loss, grads = td_loss_and_grad(net, x, 1, pred)
    assert loss == 0.0
    assert all(np.all(g == 0.0) for g in grads.arrays())

    zero = DenseNet.zeros([3, 2])
    loss, _ = td_loss_and_grad(zero, x, 0, 1.0)
    assert loss == pytest.approx(1.0)


def central_difference(net, loss_fn, param, index, step=1e-5):
    flat = param.reshape(-1)
    orig = flat[index]
    flat[index] = orig + step
    hi = loss_fn()
    flat[index] = orig - step
    lo = loss_fn()
    flat[index] = orig
    return (hi - lo) / (2 * step)


@pytest.mark.parametrize("loss_kind", ["nll", "td"])
def test_finite_difference_agreement(loss_kind, rng):
    # 50 random (net, input, label) triples per loss kind
    for _ in range(10):
        net = DenseNet.create([4, 5, 3], rng)
        assert finite_diff_check(net, loss_kind, trials=5, rng=rng) <= 1e-4


def test_corrupted_gradient_is_detected(rng):
    net = DenseNet.create([3, 4, 2], rng)
    x = rng.normal(size=3)
    _, grads = td_loss_and_grad(net, x, 0, 0.5)
    # flip the sign of one weight gradient and compare against the oracle
    g = grads.d_weights[0][0, 0]
    numeric = central_difference(
        net, lambda: (forward(net, x)[0] - 0.5) ** 2, net.weights[0], 0
    )
    err_ok = abs(numeric - g) / max(abs(numeric), abs(g), 1e-8)
    err_bad = abs(numeric - (-g)) / max(abs(numeric), abs(g), 1e-8)
    assert err_ok <= 1e-4
    assert err_bad > 1e-1


def test_finite_diff_check_zero_net_well_defined(rng):
    net = DenseNet.zeros([3, 4, 2])
    result = finite_diff_check(net, "td", trials=2, rng=rng)
    assert np.isfinite(result)


def test_adam_first_step_is_signed_learning_rate(rng):
    net = DenseNet.create([2, 3], rng)
    state = AdamState.for_net(net, lr=0.01)
    before = [p.copy() for p in net.param_arrays()]
    _, grads = nll_loss_and_grad(net, rng.normal(size=2), 1)
    adam_step(net, grads, state)
    assert state.t == 1
    for prev, now, g in zip(before, net.param_arrays(), grads.arrays()):
        nonzero = np.abs(g) > 1e-12
        delta = (now - prev)[nonzero]
        assert np.allclose(delta, -0.01 * np.sign(g[nonzero]), atol=1e-4)


def test_adam_zero_gradient_leaves_parameters(rng):
    net = DenseNet.create([2, 2], rng)
    state = AdamState.for_net(net, lr=0.1)
    before = [p.copy() for p in net.param_arrays()]
    from playmask.nets import Gradients

    adam_step(net, Gradients.zeros_like(net), state)
    for prev, now in zip(before, net.param_arrays()):
        assert np.array_equal(prev, now)


def test_adam_converges_on_quadratic(rng):
    # net [1,1]: output = w*x + b with x=1; TD target 3 makes loss ((w+b)-3)^2.
    net = DenseNet.zeros([1, 1])
    state = AdamState.for_net(net, lr=0.1)
    x = np.array([1.0])
    # independent scalar recursion over the two identical parameters
    w = b = 0.0
    m = [0.0, 0.0]
    v = [0.0, 0.0]
    for t in range(1, 101):
        _, grads = td_loss_and_grad(net, x, 0, 3.0)
        adam_step(net, grads, state)
        g = 2.0 * ((w + b) - 3.0)
        for i in range(2):
            m[i] = 0.9 * m[i] + 0.1 * g
            v[i] = 0.999 * v[i] + 0.001 * g * g
            step_ = 0.1 * (m[i] / (1 - 0.9**t)) / (math.sqrt(v[i] / (1 - 0.999**t)) + 1e-8)
            if i == 0:
                w -= step_
            else:
                b -= step_
    assert abs(forward(net, x)[0] - 3.0) < 0.1
    assert forward(net, x)[0] == pytest.approx(w + b, abs=1e-9)


def test_adam_rejects_shape_mismatch(rng):
    net = DenseNet.create([2, 3], rng)
    other = DenseNet.create([3, 2], rng)
    state = AdamState.for_net(net, lr=0.1)
    from playmask.nets import Gradients

    with pytest.raises(ValueError):
        adam_step(net, Gradients.zeros_like(other), state)


def test_deterministic_initialization():
    a = DenseNet.create([4, 8, 2], np.random.default_rng(7))
    b = DenseNet.create([4, 8, 2], np.random.default_rng(7))
    for pa, pb in zip(a.param_arrays(), b.param_arrays()):
        assert np.array_equal(pa, pb)


def test_checkpoint_round_trip(tmp_path, rng):
    net = DenseNet.create([5, 8, 3], rng)
    state = AdamState.for_net(net, lr=2e-3)
    _, grads = nll_loss_and_grad(net, rng.normal(size=5), 2)
    adam_step(net, grads, state)
    path = tmp_path / "net.ckpt"
    save_checkpoint(path, net, state, extra={"note": "42"})
    loaded, adam, extra = load_checkpoint(path)
    assert loaded.layer_sizes == net.layer_sizes
    for pa, pb in zip(loaded.param_arrays(), net.param_arrays()):
        assert np.array_equal(pa, pb)
    assert adam.t == 1 and adam.lr == 2e-3
    for ma, mb in zip(adam.m, state.m):
        assert np.array_equal(ma, mb)
    assert extra["note"] == "42"


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"not a checkpoint\nend\n")
    with pytest.raises(ValueError):
        load_checkpoint(path)
    net = DenseNet.zeros([2, 2])
    save_checkpoint(path, net)
    with open(path, "ab") as fh:
        fh.write(b"\x00" * 8)
    with pytest.raises(ValueError, match="trailing"):
        load_checkpoint(path)


@pytest.mark.skipif(BACKEND_NAME != "cython", reason="extension not built")
def test_backends_agree(rng):
    from playmask.nets import _slowdense
    from playmask.nets.backend import kernels

    for _ in range(50):
        sizes = [int(rng.integers(2, 40)) for _ in range(int(rng.integers(2, 5)))]
        net = DenseNet.create(sizes, rng)
        x = rng.normal(size=sizes[0])
        fast = kernels.mlp_forward(net.weights, net.biases, x)
        slow = _slowdense.mlp_forward(net.weights, net.biases, x)
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-12)
        vals = rng.normal(size=10)
        idx = np.sort(rng.choice(10, size=4, replace=False))
        assert kernels.argmax_over(vals, idx) == _slowdense.argmax_over(vals, idx)
