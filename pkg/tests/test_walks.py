import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gliders.ca import ConfigurationWindow, GlidersRule, evolve, evolve_rows, encode
from gliders.walks import (SparseTable, WalkPath, interpolate, particle_at, particle_row,
                           particles_from_walks, partial_sums, rescaled_walk, walks_from_cells)


def test_partial_sums_examples():
    w = partial_sums(ConfigurationWindow.from_signed(0, [1, 1, -1]))
    assert (w.lo, w.hi) == (0, 3) and w.values.tolist() == [0, 1, 2, 1]
    z = partial_sums(ConfigurationWindow.from_signed(-3, [0, 0, 0, 0]))
    assert not z.values.any()
    b = partial_sums(ConfigurationWindow.from_signed(-2, [-1, -1]))
    assert (b(-2), b(-1), b(0)) == (2, 1, 0)


def test_walk_validation():
    with pytest.raises(ValueError):
        WalkPath(0, [1, 2])
    with pytest.raises(ValueError):
        WalkPath(0, [0, 2])
    with pytest.raises(ValueError):
        WalkPath(1, [0, 1])
    w = WalkPath(-1, [1, 0, 1])
    with pytest.raises(ValueError, match="domain"):
        w.min(-2, 0)
    with pytest.raises(ValueError):
        w.min(1, 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=200), st.data())
def test_sparse_table_matches_scan(values, data):
    table = SparseTable(values)
    for _ in range(10):
        i = data.draw(st.integers(0, len(values) - 1))
        j = data.draw(st.integers(i, len(values) - 1))
        assert table.query(i, j) == min(values[i:j + 1])


def test_sparse_table_batched_and_vectorized():
    rng = np.random.default_rng(0)
    vals = rng.integers(-9, 9, size=(5, 64))
    table = SparseTable(vals)
    starts = rng.integers(0, 64, size=30)
    stops = np.minimum(63, starts + rng.integers(0, 40, size=30))
    got = table.query(starts, stops)
    want = np.array([[row[s:e + 1].min() for s, e in zip(starts, stops)] for row in vals])
    assert np.array_equal(got, want)
    with pytest.raises(IndexError):
        table.query(0, 64)


def test_particle_at_base_case_reads_cells():
    rng = np.random.default_rng(1)
    cells = rng.integers(-1, 2, size=30)
    w = partial_sums(ConfigurationWindow.from_signed(-10, cells))
    for rule in (GlidersRule(-1, 0), GlidersRule(-2, 1)):
        for j in range(-10, 19):
            assert particle_at(w, j, 0, rule) == cells[j + 10]


def test_zero_walk_has_no_particles():
    w = WalkPath(-20, np.zeros(41, dtype=int))
    rule = GlidersRule(-3, 1)
    for k in range(4):
        for j in range(-20 + k, 20 - 3 * k):
            assert particle_at(w, j, k, rule) == 0


def _check_against_simulation(cells, offset, rule, kmax):
    config = ConfigurationWindow.from_signed(offset, cells)
    walk = partial_sums(config)
    row = config
    for k in range(kmax + 1):
        lo = max(row.offset, walk.lo + rule.v_plus * k)
        hi = min(row.stop - 1, walk.hi + rule.v_minus * k - 1)
        for j in range(lo, hi + 1):
            assert particle_at(walk, j, k, rule) == row.signed()[j - row.offset], (cells, j, k)
        if len(row) <= 2 * rule.radius:
            break
        row = evolve(row, rule, 1)


@pytest.mark.parametrize("vm,vp", [(-1, 0), (-1, 1), (-2, 1)])
def test_lemma_exhaustive_short(vm, vp):
    rule = GlidersRule(vm, vp)
    for length in range(1, 7):
        for cells in product((-1, 0, 1), repeat=length):
            _check_against_simulation(np.array(cells), -(length // 2), rule, length)


def test_lemma_random_minus3_plus1():
    rng = np.random.default_rng(2)
    rule = GlidersRule(-3, 1)
    for _ in range(20):
        _check_against_simulation(rng.integers(-1, 2, size=40), -20, rule, 8)


@pytest.mark.parametrize("vm,vp", [(-1, 1), (-3, 1), (-1, 2)])
def test_batched_rows_match_evolution(vm, vp):
    rng = np.random.default_rng(3)
    rule = GlidersRule(vm, vp)
    signed = rng.integers(-1, 2, size=(50, 120))
    walks = walks_from_cells(signed, -60)
    for k in (0, 1, 5, 12):
        first, rows = particles_from_walks(walks, -60, k, rule)
        sim = evolve_rows(encode(signed), rule.local_rule(), k) - 1
        sim_first = -60 + rule.radius * k
        lo = max(first, sim_first)
        hi = min(first + rows.shape[1], sim_first + sim.shape[1])
        assert hi > lo
        assert np.array_equal(rows[:, lo - first:hi - first], sim[:, lo - sim_first:hi - sim_first])


def test_particle_row_window():
    cells = np.array([1, 0, -1, 0, 1, -1, -1, 0, 1, 0])
    w = partial_sums(ConfigurationWindow.from_signed(-5, cells))
    row = particle_row(w, 0, GlidersRule(-1, 1))
    assert row.offset == -5 and row.signed().tolist() == cells.tolist()


def test_minus_condition_holds_on_subintervals():
    rng = np.random.default_rng(4)
    rule = GlidersRule(-2, 1)
    for _ in range(20):
        w = partial_sums(ConfigurationWindow.from_signed(-40, rng.integers(-1, 2, size=80)))
        for k in range(5):
            for j in range(-40 + k, 40 - 2 * k - 1):
                if particle_at(w, j, k, rule) == -1:
                    first, last = j - rule.v_plus * k, j - rule.v_minus * k + 1
                    for p in range(first, last):
                        assert w(last) < w.min(p, last - 1)


def test_mirrored_walk_reflects_configuration():
    cells = np.array([1, 0, -1, -1, 0, 1, 1])
    c = 2
    w = partial_sums(ConfigurationWindow.from_signed(-3, cells))
    m = w.mirrored(c)
    assert m(0) == 0
    for x in range(m.lo, m.hi):
        assert m(x + 1) - m(x) == -cells[c - x + 3]


def test_rescaled_walk():
    w = partial_sums(ConfigurationWindow.from_signed(0, [1, 1, -1]))
    assert rescaled_walk(w, 4, 0.0) == 0.0
    assert rescaled_walk(w, 4, 0.5) == 1.0
    assert interpolate(w, 1.25) == pytest.approx(1.25)
    assert interpolate(w, 2.5) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        rescaled_walk(w, 0, 0.1)


def test_rescaled_walk_is_lipschitz():
    rng = np.random.default_rng(5)
    cells = rng.integers(-1, 2, size=400)
    w = partial_sums(ConfigurationWindow.from_signed(0, cells))
    n = 100
    for t1, t2 in rng.uniform(0, 4, size=(200, 2)):
        assert abs(rescaled_walk(w, n, t1) - rescaled_walk(w, n, t2)) <= math.sqrt(n) * abs(t1 - t2) + 1e-12
