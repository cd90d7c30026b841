import math

import numpy as np
import pytest

from gliders.ca import ConfigurationWindow, GlidersRule
from gliders.entrytime import (EntryTimeResult, birkhoff_asymmetry_check, cdf_from_times,
                               dependence_cone, entry_time, entry_time_by_simulation,
                               experiment_window, run_cdf_experiment, sample_entry_times,
                               theoretical_cdf)
from gliders.kernels import numpy_backend
from gliders.measures import SamplerSpec, sample_cells
from gliders.walks import partial_sums


def _random_config(rng, rule, n, horizon, side="minus", p=(1 / 3, 1 / 3, 1 / 3)):
    width = -rule.v_minus if side == "minus" else rule.v_plus
    r = rule.radius
    lo, hi = -r * (n + horizon), width - 1 + r * (n + horizon)
    cells = rng.choice([-1, 0, 1], size=hi - lo + 1, p=p)
    return ConfigurationWindow.from_signed(lo, cells)


def test_zero_configuration_never_enters():
    rule = GlidersRule(-2, 1)
    config = ConfigurationWindow.from_signed(-60, np.zeros(130, int))
    res = entry_time(partial_sums(config), rule, 5, 10)
    assert res.exceeds_horizon and res.value is None
    assert entry_time_by_simulation(config, rule, 5, 10).exceeds_horizon


def test_single_particle_arrival():
    rule = GlidersRule(-1, 0)
    n = 7
    cells = np.zeros(60, int)
    cells[30 + n + 5] = -1
    config = ConfigurationWindow.from_signed(-30, cells)
    assert entry_time(partial_sums(config), rule, n, 10).value == 5
    assert entry_time_by_simulation(config, rule, n, 10).value == 5


def test_window_counts_each_crossing_once():
    rule = GlidersRule(-3, 1)
    cells = np.zeros(80, int)
    cells[40 + 20] = -1
    config = ConfigurationWindow.from_signed(-40, cells)
    walk = partial_sums(config)
    from gliders.walks import particle_at
    hits = [(k, i) for k in range(12) for i in range(3) if particle_at(walk, i, k, rule) == -1]
    # the particle jumps 3 cells per step, so it lands in [0, 2] exactly once
    assert len(hits) == 1 and hits[0][0] == 6
    assert entry_time(walk, rule, 0, 10).value == 6


@pytest.mark.parametrize("vm,vp", [(-1, 0), (-1, 1), (-2, 1), (-3, 1), (-1, 2)])
@pytest.mark.parametrize("side", ["minus", "plus"])
def test_walk_matches_simulation(vm, vp, side):
    rule = GlidersRule(vm, vp)
    if side == "plus" and vp == 0:
        pytest.skip("no speed-0 entry times")
    rng = np.random.default_rng(abs(vm) * 10 + vp)
    n, horizon = 6, 15
    for _ in range(150):
        config = _random_config(rng, rule, n, horizon, side, p=(0.4, 0.2, 0.4))
        a = entry_time(partial_sums(config), rule, n, horizon, side)
        b = entry_time_by_simulation(config, rule, n, horizon, side)
        assert a == b


def test_walk_matches_simulation_large_cone():
    rule = GlidersRule(-3, 1)
    rng = np.random.default_rng(9)
    n, horizon = 100, 400
    for _ in range(8):
        config = _random_config(rng, rule, n, horizon)
        assert entry_time(partial_sums(config), rule, n, horizon) == \
            entry_time_by_simulation(config, rule, n, horizon)


def test_kernel_matches_walk_path():
    """The fused per-trial kernel reproduces entry_time on the same sampled cells."""
    spec = SamplerSpec.gliders_bernoulli(0.4, 0.2, 0.4, seed=12)
    for rule, side in [(GlidersRule(-3, 1), "minus"), (GlidersRule(-1, 2), "plus"),
                       (GlidersRule(-2, 1), "plus")]:
        n, horizon = 20, 60
        lo, count = experiment_window(rule, n, horizon, side)
        ids = np.arange(100)
        fused = sample_entry_times(spec, rule, n, horizon, ids, side)
        for t in ids:
            config = ConfigurationWindow(lo, sample_cells(spec, lo, lo + count - 1, int(t)))
            res = entry_time(partial_sums(config), rule, n, horizon, side)
            assert fused[t] == (-1 if res.exceeds_horizon else res.value)


def test_domain_errors():
    rule = GlidersRule(-1, 1)
    short = partial_sums(ConfigurationWindow.from_signed(-3, [0] * 6))
    with pytest.raises(ValueError, match="required range"):
        entry_time(short, rule, 5, 5)
    with pytest.raises(ValueError, match="speed-0"):
        entry_time(short, GlidersRule(-1, 0), 0, 0, side="plus")
    with pytest.raises(ValueError):
        EntryTimeResult(7, 5, 1, "minus")
    assert dependence_cone(GlidersRule(-3, 1), 10, 5) == (-15, 48)


def test_theoretical_cdf_values():
    assert theoretical_cdf(GlidersRule(-1, 0), 1.0) == pytest.approx(0.5)
    for rule in (GlidersRule(-1, 0), GlidersRule(-1, 1), GlidersRule(-3, 1)):
        assert theoretical_cdf(rule, 0.0) == 0.0
    assert theoretical_cdf(GlidersRule(-1, 1), 1e6) == pytest.approx(0.5, abs=1e-6)
    assert theoretical_cdf(GlidersRule(-3, 1), 2.0) == pytest.approx(
        2 / math.pi * math.atan(math.sqrt(6 / 6)))
    with pytest.raises(ValueError):
        theoretical_cdf(GlidersRule(-1, 1), -1.0)


@pytest.mark.parametrize("vm,vp", [(-1, 0), (-1, 1), (-3, 1), (-2, 5)])
def test_theoretical_cdf_shape(vm, vp):
    rule = GlidersRule(vm, vp)
    xs = np.linspace(0, 50, 501)
    f = theoretical_cdf(rule, xs)
    assert np.all(np.diff(f) >= 0)
    bound = 1.0 if vp == 0 else 2 / math.pi * math.atan(math.sqrt(-vm / vp))
    assert np.all(f <= bound + 1e-12)


def test_plus_side_mirrors_minus_side():
    assert theoretical_cdf(GlidersRule(-1, 3), 2.0, side="plus") == \
        pytest.approx(theoretical_cdf(GlidersRule(-3, 1), 2.0))


def test_empirical_cdf_is_monotone_with_binomial_errors():
    spec = SamplerSpec.gliders_bernoulli(0.5, 0, 0.5, seed=1)
    cdf = run_cdf_experiment(spec, GlidersRule(-1, 0), 50, [0.1, 0.5, 1, 3], 500)
    assert np.all(np.diff(cdf.estimates) >= 0)
    assert np.allclose(cdf.standard_errors, np.sqrt(cdf.estimates * (1 - cdf.estimates) / 500))
    lines = cdf.to_csv().splitlines()
    assert lines[0] == "x,empirical,theoretical,stderr,trials,n,v_minus,v_plus,side,sampler_digest"
    assert len(lines) == 5 and lines[1].startswith("0.1,")


def test_cdf_from_times_counts_exceeding_as_misses():
    cdf = cdf_from_times(np.array([-1, 0, 3, 10, -1]), [0, 1, 2], 5, GlidersRule(-1, 0), "minus", "x")
    assert cdf.estimates.tolist() == [0.2, 0.4, 0.6]


def test_results_do_not_depend_on_workers_or_backend():
    spec = SamplerSpec.gliders_bernoulli(0.3, 0.4, 0.3, seed=21)
    rule = GlidersRule(-2, 1)
    ids = np.arange(64)
    one = sample_entry_times(spec, rule, 20, 40, ids, workers=1)
    four = sample_entry_times(spec, rule, 20, 40, ids, workers=4)
    ref = sample_entry_times(spec, rule, 20, 40, ids, backend_module=numpy_backend)
    assert np.array_equal(one, four) and np.array_equal(one, ref)


def test_periodic_alternation_never_enters():
    cdf = run_cdf_experiment(SamplerSpec.gliders_dirac([1, -1], seed=3), GlidersRule(-1, 1),
                             40, [0.5, 1, 4], 200)
    assert np.all(cdf.estimates == 0)


def test_kurka_law_small_n():
    """Loose check at small n; the full-size version is an acceptance criterion."""
    spec = SamplerSpec.gliders_bernoulli(0.5, 0, 0.5, seed=5)
    cdf = run_cdf_experiment(spec, GlidersRule(-1, 0), 300, [0.5, 1, 2], 4000)
    assert np.all(cdf.deviations < 0.04)


def test_experiment_guards():
    spec = SamplerSpec.gliders_bernoulli(0.5, 0, 0.5)
    with pytest.raises(ValueError, match="trials"):
        run_cdf_experiment(spec, GlidersRule(-1, 0), 10, [1.0], 0)
    with pytest.raises(ValueError):
        run_cdf_experiment(spec, GlidersRule(-1, 0), 10, [-1.0], 10)
    with pytest.raises(ValueError, match="horizon"):
        run_cdf_experiment(spec, GlidersRule(-1, 0), 10, [2.0], 10, horizon=5)


def test_birkhoff_precondition():
    rule = GlidersRule(-1, 1)
    for p in [(0.35, 0.3, 0.35), (0.1, 0.8, 0.1), (0.2, 0.4, 0.4)]:
        with pytest.raises(ValueError, match="favour"):
            birkhoff_asymmetry_check(SamplerSpec.gliders_bernoulli(*p), rule, 10, 1.0, 10)


def test_birkhoff_small():
    spec = SamplerSpec.gliders_bernoulli(0.35, 0.4, 0.25, seed=2)
    plus_never, minus_soon = birkhoff_asymmetry_check(spec, GlidersRule(-1, 1), 400, 4.0, 500)
    assert plus_never > 0.9 and minus_soon > 0.9
