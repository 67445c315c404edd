"""Pure-numpy fallback for the compiled inference kernels."""

import numpy as np

NAME = "numpy"


def mlp_forward(weights, biases, x):
    """Single-sample forward through a rectifier net; raw final outputs."""
    h = x
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.maximum(w @ h + b, 0.0)
    return weights[-1] @ h + biases[-1]


def argmax_over(values, indices):
    """Index in `indices` with the largest value; first (lowest) wins ties."""
    return int(indices[int(np.argmax(values[indices]))])
