"""Checkpoint files: text header, then raw little-endian float64 arrays.

Layout after the header: for each layer, the weight matrix (row-major) then
the bias vector. When Adam state is saved, its first/second moment arrays
follow in the same order, and the header carries the step counter and
learning rate.
"""

from __future__ import annotations

import numpy as np

from .adam import AdamState
from .dense import DenseNet

_MAGIC = "playmask-densenet v1"


def save_checkpoint(path, net: DenseNet, adam: AdamState | None = None, extra: dict | None = None) -> None:
    lines = [_MAGIC, "layers " + " ".join(str(n) for n in net.layer_sizes)]
    if adam is not None:
        lines.append(f"adam t={adam.t} lr={adam.lr!r} beta1={adam.beta1!r} beta2={adam.beta2!r} eps={adam.eps!r}")
    for key, value in (extra or {}).items():
        lines.append(f"meta {key}={value}")
    lines.append("end")
    header = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        for arr in net.param_arrays():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        if adam is not None:
            for arr in adam.m + adam.v:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[DenseNet, AdamState | None, dict]:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        header_end = data.index(b"end\n") + len(b"end\n")
    except ValueError:
        raise ValueError(f"{path}: missing checkpoint header terminator") from None
    lines = data[:header_end].decode("ascii").splitlines()
    if not lines or lines[0] != _MAGIC:
        raise ValueError(f"{path}: not a {_MAGIC} checkpoint")

    layer_sizes: list[int] = []
    adam_meta: dict[str, float] | None = None
    extra: dict[str, str] = {}
    for line in lines[1:-1]:
        key, _, rest = line.partition(" ")
        if key == "layers":
            layer_sizes = [int(tok) for tok in rest.split()]
        elif key == "adam":
            adam_meta = dict(tok.split("=", 1) for tok in rest.split())
        elif key == "meta":
            name, _, value = rest.partition("=")
            extra[name] = value
    if len(layer_sizes) < 2:
        raise ValueError(f"{path}: header lacks layer sizes")

    net = DenseNet.zeros(layer_sizes)
    offset = header_end

    def take(shape):
        nonlocal offset
        count = int(np.prod(shape))
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
        offset += count * 8
        return arr.reshape(shape).astype(np.float64)

    for layer in range(net.n_layers):
        net.weights[layer] = take(net.weights[layer].shape)
        net.biases[layer] = take(net.biases[layer].shape)

    adam = None
    if adam_meta is not None:
        adam = AdamState.for_net(net, lr=float(adam_meta["lr"]))
        adam.t = int(adam_meta["t"])
        adam.beta1 = float(adam_meta["beta1"])
        adam.beta2 = float(adam_meta["beta2"])
        adam.eps = float(adam_meta["eps"])
        adam.m = [take(p.shape) for p in net.param_arrays()]
        adam.v = [take(p.shape) for p in net.param_arrays()]

    if offset != len(data):
        raise ValueError(f"{path}: {len(data) - offset} trailing bytes")
    return net, adam, extra
