"""Partial-sum walks and the strict-minimum particle test.

For a gliders configuration ``a`` the walk ``M`` is fixed by ``M(0) = 0``
and ``M(k+1) - M(k) = a_k``. The state of ``F^k(a)`` at ``j`` can be read
off ``M`` alone:

* ``-1`` iff ``M(j - v_minus*k + 1) < min M over {j - v_plus*k, ..., j - v_minus*k}``
* ``+1`` iff ``M(j - v_plus*k) < min M over {j - v_plus*k + 1, ..., j - v_minus*k + 1}``

Index sets are inclusive on both ends.
"""
from __future__ import annotations

import math

import numpy as np

from .ca import ConfigurationWindow, GlidersRule


class SparseTable:
    """O(1) range minima over the last axis of a 1-D or 2-D integer array.

    A 2-D input is treated as a batch of independent sequences (one per row);
    queries then broadcast over rows.
    """

    def __init__(self, values):
        values = np.asarray(values)
        if values.shape[-1] == 0:
            raise ValueError("cannot index an empty sequence")
        self.length = values.shape[-1]
        levels = [values]
        span = 1
        while 2 * span <= self.length:
            prev = levels[-1]
            levels.append(np.minimum(prev[..., :-span], prev[..., span:]))
            span *= 2
        self.levels = levels

    def query(self, start, stop):
        """Minimum over indices ``start .. stop`` inclusive (scalars or arrays)."""
        start = np.asarray(start, dtype=np.int64)
        stop = np.asarray(stop, dtype=np.int64)
        if np.any(start > stop):
            raise ValueError("empty range in minimum query")
        if np.any(start < 0) or np.any(stop >= self.length):
            raise IndexError("range minimum query outside the table")
        size = stop - start + 1
        depth = np.floor(np.log2(size)).astype(np.int64)
        # guard against log2 rounding at exact powers of two
        depth -= (1 << depth) > size
        depth += (1 << (depth + 1)) <= size
        if depth.ndim == 0:
            d = int(depth)
            lvl = self.levels[d]
            return np.minimum(lvl[..., int(start)], lvl[..., int(stop) - (1 << d) + 1])
        out = None
        for d in np.unique(depth):
            sel = depth == d
            lvl = self.levels[int(d)]
            got = np.minimum(lvl[..., start[sel]], lvl[..., stop[sel] - (1 << int(d)) + 1])
            if out is None:
                out = np.empty(lvl.shape[:-1] + start.shape, dtype=lvl.dtype)
            out[..., sel] = got
        return out


class WalkPath:
    """The walk ``M`` on the integer domain ``[lo, hi]`` with range-minimum support."""

    def __init__(self, lo: int, values):
        values = np.array(values, dtype=np.int64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("walk values must be a nonempty 1-D sequence")
        self.lo = int(lo)
        self.hi = self.lo + values.size - 1
        if not self.lo <= 0 <= self.hi:
            raise ValueError("the walk domain must contain 0")
        if values[-self.lo] != 0:
            raise ValueError("the walk must satisfy M(0) = 0")
        if values.size > 1 and np.abs(np.diff(values)).max() > 1:
            raise ValueError("walk increments must lie in {-1, 0, +1}")
        values.flags.writeable = False
        self.values = values
        self.rmq = SparseTable(values)

    def __call__(self, k: int) -> int:
        self._check(k, k)
        return int(self.values[k - self.lo])

    def _check(self, p, q):
        if p < self.lo or q > self.hi:
            raise ValueError(
                f"walk queried on [{p}, {q}] but its domain is [{self.lo}, {self.hi}]"
            )

    def min(self, p: int, q: int) -> int:
        """``min M`` over ``{p, ..., q}``."""
        if p > q:
            raise ValueError(f"empty index set {{{p}, ..., {q}}}")
        self._check(p, q)
        return int(self.rmq.query(p - self.lo, q - self.lo))

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def mirrored(self, c: int = 0) -> "WalkPath":
        """Walk of the reflected configuration ``b_x = -a_{c - x}``."""
        # M_b(x) = M_a(c + 1 - x) - M_a(c + 1)
        self._check(c + 1, c + 1)
        base = self(c + 1)
        return WalkPath(c + 1 - self.hi, self.values[::-1] - base)

    def __repr__(self):
        return f"WalkPath(lo={self.lo}, hi={self.hi})"


def partial_sums(config: ConfigurationWindow) -> WalkPath:
    """Walk of a gliders window; its domain is ``[offset, offset + len]``."""
    if not config.offset <= 0 <= config.stop:
        raise ValueError(
            f"window [{config.offset}, {config.stop - 1}] does not reach the anchor position 0"
        )
    a = config.signed().astype(np.int64)
    raw = np.concatenate(([0], np.cumsum(a)))
    return WalkPath(config.offset, raw - raw[-config.offset])


def lemma_ranges(j: int, k: int, rule: GlidersRule):
    """Walk indices read when deciding ``F^k(a)_j``: ``(first, last)`` inclusive."""
    return j - rule.v_plus * k, j - rule.v_minus * k + 1


def particle_at(walk: WalkPath, j: int, k: int, rule: GlidersRule) -> int:
    """State of ``F^k(a)_j`` computed from the walk of ``a``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    first, last = lemma_ranges(j, k, rule)
    walk._check(first, last)
    if walk(last) < walk.min(first, last - 1):
        return -1
    if walk(first) < walk.min(first + 1, last):
        return 1
    return 0


def particle_row(walk: WalkPath, k: int, rule: GlidersRule) -> ConfigurationWindow:
    """``F^k(a)`` on every position the walk can decide, as one window."""
    return ConfigurationWindow.from_signed(*_particle_row_values(walk.values, walk.lo, k, rule))


def _particle_row_values(values, lo, k, rule):
    values = np.asarray(values)
    hi = lo + values.shape[-1] - 1
    j0 = lo + rule.v_plus * k
    j1 = hi + rule.v_minus * k - 1
    if j1 < j0:
        raise ValueError(f"walk on [{lo}, {hi}] is too short to decide any cell at time {k}")
    js = np.arange(j0, j1 + 1)
    first = js - rule.v_plus * k - lo
    last = js - rule.v_minus * k + 1 - lo
    table = SparseTable(values)
    at_last = values[..., last]
    at_first = values[..., first]
    minus = at_last < table.query(first, last - 1)
    plus = at_first < table.query(first + 1, last)
    out = np.zeros(values.shape[:-1] + js.shape, dtype=np.int8)
    out[plus] = 1
    out[minus] = -1
    return int(j0), out


def particles_from_walks(values, lo: int, k: int, rule: GlidersRule):
    """Batch form of :func:`particle_row` for a 2-D array of walks sharing ``lo``.

    Returns ``(first_position, signed_rows)``.
    """
    return _particle_row_values(values, lo, k, rule)


def walks_from_cells(signed_rows, offset: int) -> np.ndarray:
    """Walks (one per row) of signed cell rows starting at ``offset``, anchored at 0."""
    signed_rows = np.asarray(signed_rows, dtype=np.int64)
    raw = np.concatenate((np.zeros(signed_rows.shape[:-1] + (1,), dtype=np.int64),
                          np.cumsum(signed_rows, axis=-1)), axis=-1)
    if not offset <= 0 <= offset + signed_rows.shape[-1]:
        raise ValueError("cells must reach the anchor position 0")
    return raw - raw[..., -offset:-offset + 1]


def interpolate(walk: WalkPath, s: float) -> float:
    """Piecewise-affine interpolation of the walk at a real argument."""
    if not walk.lo <= s <= walk.hi:
        raise ValueError(f"argument {s} outside the walk domain [{walk.lo}, {walk.hi}]")
    base = math.floor(s)
    frac = s - base
    if frac == 0.0:
        return float(walk(base))
    return (1.0 - frac) * walk(base) + frac * walk(base + 1)


def rescaled_walk(walk: WalkPath, n: int, t: float) -> float:
    """``S(n t) / sqrt(n)`` where ``S`` interpolates the walk linearly."""
    if n <= 0:
        raise ValueError("n must be positive")
    return interpolate(walk, n * t) / math.sqrt(n)
