"""The numba kernels and the numpy fallback must agree bit for bit."""
import numpy as np
import pytest

from gliders.ca import GlidersRule
from gliders.entrytime import Projection, experiment_window
from gliders.factors import builtin_factor
from gliders.kernels import as_seed, get_backend, numba_backend, numpy_backend
from gliders.measures import SamplerSpec
from gliders.rng import GOLDEN, mix64, stream_key, uniform_scalar, uniforms

pytestmark = pytest.mark.skipif(numba_backend is None, reason="numba not importable")


def test_splitmix_reference_values():
    # published SplitMix64 outputs for state 1234567
    state = 1234567
    outs = []
    for _ in range(3):
        state = (state + GOLDEN) & ((1 << 64) - 1)
        outs.append(mix64(state))
    assert outs == [6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_uniform_helpers_agree():
    key, gamma = stream_key(42, 7, 0)
    u = uniforms(key, gamma, -5, 10)
    assert all(u[i] == uniform_scalar(key, gamma, i - 5) for i in range(10))
    assert np.all((u >= 0) & (u < 1))


SAMPLERS = [
    SamplerSpec.gliders_bernoulli(0.25, 0.5, 0.25, seed=3),
    SamplerSpec.markov([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3], [0.3, 0.3, 0.4]], seed=5),
    SamplerSpec.gliders_dirac([1, 0, -1, -1], seed=6),
    SamplerSpec.gliders_dirac([1, -1], uniform_phase=False),
]


@pytest.mark.parametrize("spec", SAMPLERS, ids=lambda s: s.kind + str(s.uniform_phase))
def test_sampling_backends_agree(spec):
    args = spec.kernel_args()
    for trial, start, count in [(0, -500, 1000), (17, 3, 1), (2**40, -7, 300)]:
        a = numba_backend.sample_cells(as_seed(spec.seed), trial, args[0], start, count, *args[1:])
        b = numpy_backend.sample_cells(as_seed(spec.seed), trial, args[0], start, count, *args[1:])
        assert np.array_equal(a, b)


def test_apply_table_backends_agree():
    rng = np.random.default_rng(0)
    for rule in (GlidersRule(-1, 1), GlidersRule(-3, 1)):
        local = rule.local_rule()
        cells = rng.integers(0, 3, size=(7, 80)).astype(np.int8)
        a = numba_backend.apply_table(cells, local.table, local.radius, 3)
        b = numpy_backend.apply_table(cells, local.table, local.radius, 3)
        assert np.array_equal(a, b)


@pytest.mark.parametrize("vm,vp,side", [(-1, 0, "minus"), (-1, 1, "minus"), (-3, 1, "minus"),
                                        (-3, 1, "plus"), (-1, 2, "plus"), (-2, 3, "minus")])
def test_entry_time_backends_agree(vm, vp, side):
    spec = SamplerSpec.gliders_bernoulli(0.4, 0.2, 0.4, seed=8)
    proj = Projection.identity()
    n, horizon = 30, 90
    rule = GlidersRule(vm, vp)
    lo, count = experiment_window(rule, n, horizon, side)
    ids = np.arange(300, dtype=np.int64)
    outs = []
    for be in (numba_backend, numpy_backend):
        kind, cum, cs, cm, word = spec.kernel_args()
        outs.append(be.entry_times(as_seed(spec.seed), ids, kind, cum, cs, cm, word, proj.table,
                                   1, 3, lo, count, side == "plus", vm, vp, n, horizon))
    assert np.array_equal(*outs)
    assert (outs[0] >= 0).any()


def test_projected_entry_time_backends_agree():
    fac = builtin_factor("cyclic3")
    spec = SamplerSpec.bernoulli([1 / 3] * 3, seed=2)
    proj = fac.projection()
    n, horizon = 40, 80
    lo, count = experiment_window(fac.target, n, horizon, "minus", proj.order)
    ids = np.arange(200, dtype=np.int64)
    kind, cum, cs, cm, word = spec.kernel_args()
    outs = [be.entry_times(as_seed(2), ids, kind, cum, cs, cm, word, proj.table, proj.order, 3,
                           lo, count, False, -1, 1, n, horizon)
            for be in (numba_backend, numpy_backend)]
    assert np.array_equal(*outs)


@pytest.mark.parametrize("kind,threshold", [(0, 0), (1, 16384), (1, 3000)])
def test_walk_minima_backends_agree(kind, threshold):
    ids = np.arange(50, dtype=np.int64)
    for steps in (0, 1, 63, 64, 65, 1001):
        a = numba_backend.walk_minima(as_seed(4), ids, steps, 2, kind, threshold)
        b = numpy_backend.walk_minima(as_seed(4), ids, steps, 2, kind, threshold)
        assert np.array_equal(a, b)
        assert np.all(a <= 0) and np.all(a >= -steps)


def test_get_backend():
    assert get_backend("numpy") is numpy_backend
    assert get_backend("numba") is numba_backend
    with pytest.raises(ValueError):
        get_backend("cuda")
