"""Seedable, splittable random streams.

A stream is the Philox4x64-10 counter-based generator keyed by the pair
(seed, stream_id).  Only the raw 64-bit words are taken from numpy; the
conversion to uniforms and normals happens here, so the output depends on
nothing but the Philox bitstream and the fixed transforms below:

* uniform: ``((word >> 11) + 0.5) * 2**-53``, strictly inside (0, 1)
* normal:  Box-Muller on consecutive uniform pairs, cosine branch first
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class RngStream:
    """Deterministic stream for one (seed, stream_id) pair.

    Single-owner: do not draw from one stream on two threads.  Use
    ``child`` to hand independent streams to workers.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed, stream_id = int(seed), int(stream_id)
        if not (0 <= seed <= MASK64 and 0 <= stream_id <= MASK64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = seed
        self.stream_id = stream_id
        self._bits = np.random.Philox(key=seed | (stream_id << 64))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, index: int) -> RngStream:
        """A new stream with the same seed and a derived stream_id."""
        return RngStream(self.seed, splitmix64(self.stream_id ^ splitmix64(int(index) + 1)))

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(int(n))

    def uniform(self, n: int) -> np.ndarray:
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        n = int(n)
        m = (n + 1) // 2
        u = self.uniform(2 * m).reshape(m, 2)
        r = np.sqrt(-2.0 * np.log(u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        z = np.empty((m, 2))
        z[:, 0] = r * np.cos(theta)
        z[:, 1] = r * np.sin(theta)
        return z.ravel()[:n]
