"""Deterministic random substreams shared by every simulation component.

A SplitMix64 generator keyed by (master seed, stream id) drives all
randomness.  Each channel, the sensing-error draw, and the scheme draw
consume independent substreams, so adding or removing one consumer never
perturbs the draws seen by the others, and the NumPy and numba simulation
backends can reproduce the exact same bit streams.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF
_ID_SALT = 0xD1B54A32D192ED03

# Stream ids 0..14 belong to the channels; auxiliary consumers live far away.
SENSING_STREAM = 1 << 32
SCHEME_STREAM = (1 << 32) + 1

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53

_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_GAMMA_U = np.uint64(GOLDEN)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output function on a uint64 array (wraps modulo 2**64)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


def _mix_int(x: int) -> int:
    return int(mix64(np.array([x & _MASK64], dtype=np.uint64))[0])


def substream_state(master_seed: int, stream_id: int) -> int:
    """Initial SplitMix64 state for one (master seed, stream id) substream."""
    a = _mix_int((master_seed & _MASK64) + GOLDEN)
    b = _mix_int((stream_id & _MASK64) ^ _ID_SALT)
    return _mix_int(a ^ b)


def raw_block(state: int, count: int) -> tuple[np.ndarray, int]:
    """Next `count` uint64 outputs of the stream plus the advanced state."""
    ks = np.arange(1, count + 1, dtype=np.uint64)
    states = np.uint64(state) + ks * _GAMMA_U
    return mix64(states), int(states[-1])


def uniform01(block: np.ndarray) -> np.ndarray:
    """Map uint64 outputs to doubles in [0, 1)."""
    return (block >> np.uint64(11)).astype(np.float64) * _INV_2_53


def open_unit(block: np.ndarray) -> np.ndarray:
    """Map uint64 outputs to doubles strictly inside (0, 1)."""
    return ((block >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


class Stream:
    """A sequentially consumed substream with scalar and batch draws."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    @classmethod
    def substream(cls, master_seed: int, stream_id: int) -> "Stream":
        return cls(substream_state(master_seed, stream_id))

    def raw(self, count: int) -> np.ndarray:
        block, self.state = raw_block(self.state, count)
        return block

    def uniform(self) -> float:
        return float(uniform01(self.raw(1))[0])

    def uniforms(self, count: int) -> np.ndarray:
        return uniform01(self.raw(count))

    def exponential(self, rate, count: int | None = None):
        """Strictly positive Exponential(rate) draws; `rate` may be an array."""
        u = open_unit(self.raw(1 if count is None else count))
        out = -np.log(u) / rate
        return float(out[0]) if count is None else out
