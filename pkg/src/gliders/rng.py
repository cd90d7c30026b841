"""Counter-based random streams.

Every random draw is a pure function of ``(seed, stream, lane, counter)``:

* ``seed``    64-bit master seed of an experiment,
* ``stream``  the trial index,
* ``lane``    which consumer inside a trial (cells, phase, left walk, ...),
* ``counter`` the absolute cell position (or step index).

A (stream, lane) pair is turned into a SplitMix64 state ``key`` and an odd
increment ``gamma``; the draw at ``counter`` is ``mix64(key + gamma*counter)``.
Nothing is sequential, so trials can be computed in any order, on any number
of workers, and a cell keeps its value when the sampled window grows.

The same arithmetic lives in the numba kernels; the two are checked
against each other bit for bit in the tests.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0

LANE_CELLS = 0
LANE_PHASE = 1
LANE_LEFT_WALK = 2
LANE_RIGHT_WALK = 3


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int, lane: int = LANE_CELLS) -> tuple[int, int]:
    """Return ``(key, gamma)`` for one (seed, stream, lane) triple."""
    if stream < 0:
        raise ValueError(f"stream index must be nonnegative, got {stream}")
    base = mix64((seed & MASK64) + GOLDEN * (lane + 1))
    key = mix64(base + GOLDEN * (stream + 1))
    gamma = mix64(key + GOLDEN) | 1
    return key, gamma


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def raw_draws(key: int, gamma: int, counters: np.ndarray) -> np.ndarray:
    """64-bit draws at the given (signed) counters."""
    c = np.ascontiguousarray(counters, dtype=np.int64).view(np.uint64)
    return mix64_array(np.uint64(key) + np.uint64(gamma) * c)


def uniforms(key: int, gamma: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) at counters ``start .. start+count-1``."""
    z = raw_draws(key, gamma, np.arange(start, start + count, dtype=np.int64))
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53


def uniform_scalar(key: int, gamma: int, counter: int) -> float:
    z = mix64(key + gamma * (counter & MASK64))
    return (z >> 11) * INV_2_53
