"""Compare the compiled inference kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py

The compiled path targets the per-step inference ops (single-state forward
passes and masked argmaxes); batch training math stays on BLAS-backed numpy
in both configurations, so it is reported once for context.
"""

import time

import numpy as np

from playmask.nets import DenseNet, _slowdense
from playmask.nets.backend import BACKEND_NAME, kernels


def timeit(fn, warmup=200, reps=5000):
    for _ in range(warmup):
        fn()
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - start) / reps * 1e6


def main():
    rng = np.random.default_rng(0)
    shapes = {
        "value-net [14,128,256,10]": [14, 128, 256, 10],
        "prior-net [11,200,200,10]": [11, 200, 200, 10],
    }
    print(f"active backend: {BACKEND_NAME}")
    print(f"{'case':<34} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for label, sizes in shapes.items():
        net = DenseNet.create(sizes, rng)
        x = rng.normal(size=sizes[0])
        fast = timeit(lambda: kernels.mlp_forward(net.weights, net.biases, x))
        slow = timeit(lambda: _slowdense.mlp_forward(net.weights, net.biases, x))
        print(f"{label:<34} {fast:>8.1f}us {slow:>8.1f}us {slow / fast:>7.2f}x")

    net = DenseNet.create([14, 128, 256, 10], rng)
    x = rng.normal(size=14)
    values = kernels.mlp_forward(net.weights, net.biases, x)
    feas = np.array([0, 2, 5, 6, 9], dtype=np.int64)
    fast = timeit(lambda: kernels.argmax_over(values, feas), reps=20000)
    slow = timeit(lambda: _slowdense.argmax_over(values, feas), reps=20000)
    print(f"{'masked argmax over 5 actions':<34} {fast:>8.1f}us {slow:>8.1f}us {slow / fast:>7.2f}x")

    xs = rng.normal(size=(256, 14))
    batched = timeit(
        lambda: np.maximum(xs @ net.weights[0].T + net.biases[0], 0.0), reps=2000
    )
    print(f"\nbatch-256 first-layer matmul (BLAS, both backends): {batched:.1f}us")


if __name__ == "__main__":
    main()
