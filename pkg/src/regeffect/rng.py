"""Reproducible random numbers for the simulation harness.

SplitMix64 run in counter mode: draw ``i`` of stream ``s`` under seed ``seed``
is ``mix(mix(seed + G*(s+1)) + G*(i+1))`` with ``G = 0x9E3779B97F4A7C15`` and
``mix`` the SplitMix64 finaliser.  Because every value is a pure function of
``(seed, stream, index)``, results do not depend on how replications are
chunked or ordered.  Normal variates use the Marsaglia polar method, taking
candidate pairs in counter order.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_TWO_M53 = 2.0 ** -53


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


class CounterRNG:
    """Stateless SplitMix64 generator keyed by ``(seed, stream, index)``."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = int(seed)

    def _keys(self, streams) -> np.ndarray:
        s = np.asarray(streams, dtype=np.uint64)
        return _mix64(np.uint64(self.seed) + _GOLDEN * (s + np.uint64(1)))

    def bits(self, streams, start: int, count: int) -> np.ndarray:
        """Raw 64-bit outputs, shape ``(len(streams), count)``."""
        keys = self._keys(streams)[:, None]
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)[None, :]
        return _mix64(keys + _GOLDEN * idx)

    def uniform(self, streams, start: int, count: int) -> np.ndarray:
        """Uniforms on [0, 1) with 53 random bits."""
        return (self.bits(streams, start, count) >> _S11).astype(float) * _TWO_M53

    def normals(self, streams, count: int) -> np.ndarray:
        """``count`` standard normals per stream, shape ``(len(streams), count)``."""
        streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
        need = (count + 1) // 2
        if need == 0:
            return np.zeros((streams.size, 0))
        pairs = int(need * 1.3) + 8
        while True:
            u = 2.0 * self.uniform(streams, 0, 2 * pairs) - 1.0
            u1, u2 = u[:, 0::2], u[:, 1::2]
            s = u1 * u1 + u2 * u2
            ok = (s > 0.0) & (s < 1.0)
            if np.all(ok.sum(axis=1) >= need):
                break
            pairs *= 2
        take = ok & (np.cumsum(ok, axis=1) <= need)
        s_t = s[take].reshape(streams.size, need)
        f = np.sqrt(-2.0 * np.log(s_t) / s_t)
        z = np.empty((streams.size, 2 * need))
        z[:, 0::2] = u1[take].reshape(streams.size, need) * f
        z[:, 1::2] = u2[take].reshape(streams.size, need) * f
        return z[:, :count]
