"""Uniform experience replay over goal-conditioned transitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CHUNK = 65_536


@dataclass
class Transition:
    s: np.ndarray  # (11,)
    a: int
    r: float
    sp: np.ndarray  # (11,)
    g: np.ndarray  # (3,)
    done: bool
    demo: bool = False


class ReplayBuffer:
    """FIFO ring buffer with uniform sampling.

    Storage grows in chunks up to the capacity, so short runs never pay for
    the full ring.
    """

    def __init__(self, capacity: int = 1_000_000):
        self.capacity = capacity
        self.size = 0
        self._next = 0
        self._alloc = 0
        self._s = self._sp = self._g = None
        self._a = self._r = self._done = self._demo = None

    def _grow(self, rows: int) -> None:
        new = min(self.capacity, max(rows, self._alloc + _CHUNK))
        def ext(arr, shape, dtype):
            fresh = np.zeros(shape, dtype=dtype)
            if arr is not None:
                fresh[: self._alloc] = arr
            return fresh

        self._s = ext(self._s, (new, 11), np.float64)
        self._sp = ext(self._sp, (new, 11), np.float64)
        self._g = ext(self._g, (new, 3), np.float64)
        self._a = ext(self._a, (new,), np.int64)
        self._r = ext(self._r, (new,), np.float64)
        self._done = ext(self._done, (new,), np.float64)
        self._demo = ext(self._demo, (new,), np.bool_)
        self._alloc = new

    def insert(self, s, a, r, sp, g, done, demo=False) -> None:
        if self._next >= self._alloc and self._alloc < self.capacity:
            self._grow(self._next + 1)
        i = self._next
        self._s[i] = s
        self._a[i] = a
        self._r[i] = r
        self._sp[i] = sp
        self._g[i] = g
        self._done[i] = float(done)
        self._demo[i] = demo
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def insert_transition(self, tr: Transition) -> None:
        self.insert(tr.s, tr.a, tr.r, tr.sp, tr.g, tr.done, tr.demo)

    def sample(self, rng: np.random.Generator, n: int) -> dict:
        if self.size < n:
            raise ValueError(f"buffer holds {self.size} < batch {n}")
        idx = rng.integers(self.size, size=n)
        return {
            "s": self._s[idx],
            "a": self._a[idx],
            "r": self._r[idx],
            "sp": self._sp[idx],
            "g": self._g[idx],
            "done": self._done[idx],
            "demo": self._demo[idx],
        }
