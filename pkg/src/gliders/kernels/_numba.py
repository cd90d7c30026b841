"""numba implementations of the hot loops.

Signatures mirror ``_numpy`` exactly; see that module for the contracts.
All kernels release the GIL so trial batches can run on a thread pool.
"""
import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0

_KIND_BERNOULLI = 0
_KIND_MARKOV = 1
_KIND_PERIODIC = 2
_KIND_PERIODIC_PHASE = 3

_LANE_CELLS = 0
_LANE_PHASE = 1


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _stream_key(seed, stream, lane):
    base = _mix64(seed + _GOLDEN * np.uint64(lane + 1))
    key = _mix64(base + _GOLDEN * np.uint64(stream + 1))
    gamma = _mix64(key + _GOLDEN) | _ONE
    return key, gamma


@njit(inline="always")
def _uniform(key, gamma, counter):
    z = _mix64(key + gamma * np.uint64(counter))
    return (z >> np.uint64(11)) * _INV_2_53


@njit(inline="always")
def _categorical(cum, u):
    s = 0
    last = cum.shape[0] - 1
    while s < last and u >= cum[s]:
        s += 1
    return s


@njit(nogil=True, cache=True)
def _fill_cells(seed, trial, kind, start, out, cum, cum_stat, cum_mat, word):
    count = out.shape[0]
    key, gamma = _stream_key(seed, trial, _LANE_CELLS)
    if kind == _KIND_BERNOULLI:
        for q in range(count):
            out[q] = _categorical(cum, _uniform(key, gamma, start + q))
    elif kind == _KIND_MARKOV:
        s = _categorical(cum_stat, _uniform(key, gamma, start))
        out[0] = s
        for q in range(1, count):
            s = _categorical(cum_mat[s], _uniform(key, gamma, start + q))
            out[q] = s
    else:
        period = word.shape[0]
        phase = 0
        if kind == _KIND_PERIODIC_PHASE:
            pkey, pgamma = _stream_key(seed, trial, _LANE_PHASE)
            phase = int(_uniform(pkey, pgamma, 0) * period)
        for q in range(count):
            out[q] = word[(start + q + phase) % period]


@njit(nogil=True, cache=True)
def sample_cells(seed, trial, kind, start, count, cum, cum_stat, cum_mat, word):
    out = np.empty(count, dtype=np.int8)
    _fill_cells(np.uint64(seed), trial, kind, start, out, cum, cum_stat, cum_mat, word)
    return out


@njit(nogil=True, cache=True)
def apply_table(cells, table, radius, alphabet):
    rows, width = cells.shape
    span = 2 * radius + 1
    out_w = width - 2 * radius
    out = np.empty((rows, out_w), dtype=np.int8)
    top = 1
    for _ in range(span - 1):
        top *= alphabet
    for b in range(rows):
        code = 0
        for q in range(span):
            code = code * alphabet + cells[b, q]
        out[b, 0] = table[code]
        for j in range(1, out_w):
            code = (code - cells[b, j - 1] * top) * alphabet + cells[b, j + span - 1]
            out[b, j] = table[code]
    return out


@njit(nogil=True, cache=True)
def project_words(cells, table, order, alphabet):
    rows, width = cells.shape
    out_w = width - order + 1
    out = np.empty((rows, out_w), dtype=np.int8)
    for b in range(rows):
        for j in range(out_w):
            code = 0
            for q in range(order):
                code = code * alphabet + cells[b, j + q]
            out[b, j] = table[code]
    return out


@njit(inline="always")
def _entry_time_core(s, lo, v_minus, v_plus, n, horizon, walk, leftmin, rightmin):
    width = s.shape[0]
    m = -v_minus
    walk[0] = 0
    for q in range(width):
        walk[q + 1] = walk[q] + s[q]
    # every query interval (for t >= 1) contains the anchor position m-1
    a = m - 1 - lo
    run = walk[a]
    for q in range(a, -1, -1):
        if walk[q] < run:
            run = walk[q]
        leftmin[q] = run
    run = walk[a]
    for q in range(a, width + 1):
        if walk[q] < run:
            run = walk[q]
        rightmin[q] = run
    for k in range(horizon + 1):
        t = n + k
        for i in range(m):
            if t == 0:
                if s[i - lo] == -1:
                    return k
                continue
            left = i - v_plus * t - lo
            right = i + m * t - lo
            low = leftmin[left]
            if rightmin[right] < low:
                low = rightmin[right]
            if walk[right + 1] < low:
                return k
    return -1


@njit(nogil=True, cache=True)
def entry_times(seed, trials, kind, cum, cum_stat, cum_mat, word, proj, order,
                alphabet, src_lo, n_src, mirror, v_minus, v_plus, n, horizon):
    useed = np.uint64(seed)
    width = n_src - order + 1
    src = np.empty(n_src, dtype=np.int8)
    signed = np.empty(width, dtype=np.int8)
    walk = np.empty(width + 1, dtype=np.int64)
    leftmin = np.empty(width + 1, dtype=np.int64)
    rightmin = np.empty(width + 1, dtype=np.int64)
    out = np.empty(trials.shape[0], dtype=np.int64)
    if mirror:
        lo = (v_plus - 1) - (src_lo + width - 1)
        # walk over the mirror image runs under the reflected rule
        vm, vp = -v_plus, -v_minus
    else:
        lo = src_lo
        vm, vp = v_minus, v_plus
    for b in range(trials.shape[0]):
        _fill_cells(useed, trials[b], kind, src_lo, src, cum, cum_stat, cum_mat, word)
        for j in range(width):
            code = 0
            for q in range(order):
                code = code * alphabet + src[j + q]
            if mirror:
                signed[width - 1 - j] = -proj[code]
            else:
                signed[j] = proj[code]
        out[b] = _entry_time_core(signed, lo, vm, vp, n, horizon, walk, leftmin, rightmin)
    return out


@njit(nogil=True, cache=True)
def walk_minima(seed, trials, steps, lane, kind, threshold):
    useed = np.uint64(seed)
    out = np.empty(trials.shape[0], dtype=np.int64)
    lo16 = np.uint64(threshold)
    hi16 = np.uint64(65536 - threshold)
    for b in range(trials.shape[0]):
        key, gamma = _stream_key(useed, trials[b], lane)
        pos = 0
        low = 0
        if kind == 0:
            # fair +-1: one bit per step, 64 steps per draw
            for w in range((steps + 63) // 64):
                z = _mix64(key + gamma * np.uint64(w))
                stop = min(64, steps - 64 * w)
                for q in range(stop):
                    if (z >> np.uint64(q)) & _ONE:
                        pos += 1
                    else:
                        pos -= 1
                        if pos < low:
                            low = pos
        else:
            # three-point law: 16-bit slices, -1 below threshold, +1 at the top
            for w in range((steps + 3) // 4):
                z = _mix64(key + gamma * np.uint64(w))
                stop = min(4, steps - 4 * w)
                for q in range(stop):
                    u = (z >> np.uint64(16 * q)) & np.uint64(0xFFFF)
                    if u < lo16:
                        pos -= 1
                        if pos < low:
                            low = pos
                    elif u >= hi16:
                        pos += 1
        out[b] = low
    return out
