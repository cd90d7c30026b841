"""Pure-numpy implementations of the hot loops.

Used when numba is unavailable or disabled through ``GLIDERS_DISABLE_NUMBA``.
Results are bit-identical to the numba kernels.

Sampler ``kind`` codes: 0 Bernoulli (``cum``), 1 Markov (``cum_stat``,
``cum_mat``), 2 periodic ``word`` with phase 0, 3 periodic ``word`` with a
uniform random phase.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .. import rng

KIND_BERNOULLI = 0
KIND_MARKOV = 1
KIND_PERIODIC = 2
KIND_PERIODIC_PHASE = 3


def _categorical(cum, u):
    # smallest s with u < cum[s]; the last state absorbs rounding
    s = np.searchsorted(cum, u, side="right")
    return np.minimum(s, cum.shape[-1] - 1).astype(np.int8)


def _markov_chain(s0, cum_mat, u):
    """States x_1.. of a chain started at ``s0``, driven by uniforms ``u``.

    The one-step maps are composed with a doubling prefix scan so the chain
    is built in O(W log W) vectorized work instead of a Python loop.
    """
    alphabet = cum_mat.shape[0]
    maps = np.empty((u.shape[0], alphabet), dtype=np.int64)
    for s in range(alphabet):
        maps[:, s] = np.minimum(np.searchsorted(cum_mat[s], u, side="right"), alphabet - 1)
    d = 1
    while d < maps.shape[0]:
        maps[d:] = np.take_along_axis(maps[d:], maps[:-d], axis=1)
        d *= 2
    return maps[:, s0]


def sample_cells(seed, trial, kind, start, count, cum, cum_stat, cum_mat, word):
    seed = int(seed)
    key, gamma = rng.stream_key(seed, int(trial), rng.LANE_CELLS)
    if kind == KIND_BERNOULLI:
        return _categorical(cum, rng.uniforms(key, gamma, start, count))
    if kind == KIND_MARKOV:
        u = rng.uniforms(key, gamma, start, count)
        out = np.empty(count, dtype=np.int8)
        s0 = int(_categorical(cum_stat, u[:1])[0])
        out[0] = s0
        if count > 1:
            out[1:] = _markov_chain(s0, cum_mat, u[1:])
        return out
    period = word.shape[0]
    phase = 0
    if kind == KIND_PERIODIC_PHASE:
        pkey, pgamma = rng.stream_key(seed, int(trial), rng.LANE_PHASE)
        phase = int(rng.uniform_scalar(pkey, pgamma, 0) * period)
    idx = (np.arange(start, start + count, dtype=np.int64) + phase) % period
    return word[idx].astype(np.int8)


def _codes(cells, span, alphabet):
    windows = sliding_window_view(cells.astype(np.int64), span, axis=-1)
    weights = alphabet ** np.arange(span - 1, -1, -1, dtype=np.int64)
    return windows @ weights


def apply_table(cells, table, radius, alphabet):
    return table[_codes(cells, 2 * radius + 1, alphabet)].astype(np.int8)


def project_words(cells, table, order, alphabet):
    return table[_codes(cells, order, alphabet)].astype(np.int8)


def _entry_time_core(s, lo, v_minus, v_plus, n, horizon):
    m = -v_minus
    walk = np.concatenate(([0], np.cumsum(s, dtype=np.int64)))
    a = m - 1 - lo
    leftmin = np.minimum.accumulate(walk[a::-1])[::-1]
    rightmin = np.minimum.accumulate(walk[a:])
    t = n + np.arange(horizon + 1, dtype=np.int64)[:, None]
    i = np.arange(m, dtype=np.int64)[None, :]
    safe = np.maximum(t, 1)
    left_s = i - v_plus * safe - lo
    right_s = i + m * safe - lo
    low = np.minimum(leftmin[left_s], rightmin[right_s - a])
    hit = walk[right_s + 1] < low
    if n == 0:
        hit[0] = s[np.arange(m) - lo] == -1
    rows = np.flatnonzero(hit.any(axis=1))
    return int(rows[0]) if rows.size else -1


def entry_times(seed, trials, kind, cum, cum_stat, cum_mat, word, proj, order,
                alphabet, src_lo, n_src, mirror, v_minus, v_plus, n, horizon):
    width = n_src - order + 1
    out = np.empty(len(trials), dtype=np.int64)
    if mirror:
        lo = (v_plus - 1) - (src_lo + width - 1)
        vm, vp = -v_plus, -v_minus
    else:
        lo = src_lo
        vm, vp = v_minus, v_plus
    for b, trial in enumerate(trials):
        src = sample_cells(seed, trial, kind, src_lo, n_src, cum, cum_stat, cum_mat, word)
        signed = project_words(src[None, :], proj, order, alphabet)[0]
        if mirror:
            signed = -signed[::-1]
        out[b] = _entry_time_core(signed, lo, vm, vp, n, horizon)
    return out


def walk_minima(seed, trials, steps, lane, kind, threshold, chunk=64):
    seed = int(seed)
    out = np.empty(len(trials), dtype=np.int64)
    per_draw = 64 if kind == 0 else 4
    n_draws = (steps + per_draw - 1) // per_draw
    counters = np.arange(n_draws, dtype=np.int64)
    for c0 in range(0, len(trials), chunk):
        block = trials[c0:c0 + chunk]
        draws = np.empty((len(block), n_draws), dtype=np.uint64)
        for r, trial in enumerate(block):
            key, gamma = rng.stream_key(seed, int(trial), lane)
            draws[r] = rng.raw_draws(key, gamma, counters)
        if kind == 0:
            bits = (draws[:, :, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)
            inc = bits.reshape(len(block), -1)[:, :steps].astype(np.int64) * 2 - 1
        else:
            u = (draws[:, :, None] >> (16 * np.arange(4, dtype=np.uint64))) & np.uint64(0xFFFF)
            u = u.reshape(len(block), -1)[:, :steps]
            inc = (u >= np.uint64(65536 - threshold)).astype(np.int64)
            inc -= (u < np.uint64(threshold)).astype(np.int64)
        walks = np.cumsum(inc, axis=1)
        # the start M(0) = 0 is part of the path, which also covers steps = 0
        out[c0:c0 + len(block)] = np.minimum(walks.min(axis=1, initial=0), 0)
    return out
