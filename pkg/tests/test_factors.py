from itertools import product

import numpy as np
import pytest

from gliders.ca import ConfigurationWindow, GlidersRule, LocalRule, step
from gliders.factors import (FactorSpec, SftSpec, builtin_factor, captive_rule, commutation_check,
                             cyclic3_rule, defect_projection, lifted_cdf_experiment, product_rule,
                             project_rows, traffic_rule)
from gliders.measures import SamplerSpec, estimate_asymptotic_variance


def _win(cells, A=2, offset=0):
    return ConfigurationWindow(offset, np.array(cells), A)


def test_sft_validation():
    with pytest.raises(ValueError, match="both"):
        SftSpec(2, 2, {(0, 0)}, {(0, 0)})
    with pytest.raises(ValueError, match="length"):
        SftSpec(2, 2, {(0,)}, set())
    with pytest.raises(ValueError):
        SftSpec(2, 2, {(0, 2)}, set())


def test_traffic_projection_example():
    _, fac = traffic_rule()
    out = defect_projection(_win([0, 0, 1, 1, 0]), fac.sft)
    assert out.offset == 0 and out.signed().tolist() == [1, 0, -1, 0]
    assert not defect_projection(_win([0, 1, 0, 1, 0, 1]), fac.sft).signed().any()
    with pytest.raises(ValueError):
        defect_projection(_win([0]), fac.sft)


def test_cyclic_projection_example():
    _, fac = cyclic3_rule()
    out = defect_projection(_win([0, 0, 1], 3), fac.sft).signed().tolist()
    assert out == [0, fac.sft.word_value((0, 1))]
    assert fac.sft.word_value((0, 1)) == -1


def test_truth_tables():
    traffic, _ = traffic_rule()
    table = {w: int(traffic.apply_windows(np.array([w]))[0]) for w in product((0, 1), repeat=3)}
    assert table == {(0, 0, 0): 0, (0, 0, 1): 0, (0, 1, 0): 0, (0, 1, 1): 1,
                     (1, 0, 0): 1, (1, 0, 1): 1, (1, 1, 0): 0, (1, 1, 1): 1}
    cyc, _ = cyclic3_rule()
    assert int(cyc.apply_windows(np.array([[1, 0, 0]]))[0]) == 1
    assert int(cyc.apply_windows(np.array([[0, 2, 1]]))[0]) == 0
    prod, _ = product_rule()
    for w in product((0, 1), repeat=3):
        assert int(prod.apply_windows(np.array([w]))[0]) == int(all(w))


@pytest.mark.parametrize("name,width", [("traffic", 10), ("cyclic3", 8), ("product", 10),
                                        ("captive-identity", 10), ("captive-shift", 10)])
def test_builtins_commute_exhaustively(name, width):
    rep = commutation_check(builtin_factor(name), width=width, exhaustive=True)
    assert rep.passed and rep.checked == builtin_factor(name).sft.alphabet_size ** width


@pytest.mark.parametrize("name", ["traffic", "cyclic3", "product", "captive-identity", "captive-shift"])
def test_builtins_commute_on_random_windows(name):
    rep = commutation_check(builtin_factor(name), 200, 300, np.random.default_rng(1))
    assert rep.passed and rep.checked == 200


def test_swapped_split_fails_with_counterexample():
    _, fac = traffic_rule()
    bad = FactorSpec("bad", fac.source_rule, SftSpec(2, 2, {(1, 1)}, {(0, 0)}), fac.target)
    rep = commutation_check(bad, width=8, exhaustive=True)
    assert not rep.passed and rep.counterexample is not None
    a = rep.counterexample
    lhs = defect_projection(step(a, bad.source_rule), bad.sft).signed()
    rhs = step(defect_projection(a, bad.sft), bad.target).signed()
    assert not np.array_equal(lhs[:len(rhs)], rhs[:len(lhs)])


def test_captive_choices():
    _, ident = captive_rule(lambda a, b: a)
    assert ident.sft.forbidden_plus == {(0, 1), (1, 0)} and not ident.sft.forbidden_minus
    _, shift = captive_rule(lambda a, b: b)
    assert shift.sft.forbidden_minus == {(0, 1), (1, 0)} and not shift.sft.forbidden_plus
    _, minimum = captive_rule(lambda a, b: min(a, b))
    assert minimum.sft.forbidden_plus == {(0, 1)} and minimum.sft.forbidden_minus == {(1, 0)}
    with pytest.raises(ValueError, match="neither"):
        captive_rule(lambda a, b: 0 if a == b else 2 - a - b, 3)
    with pytest.raises(ValueError, match="commute"):
        captive_rule(lambda a, b: max(a, b), 3)


def test_projection_commutes_with_translation():
    rng = np.random.default_rng(2)
    for name in ("traffic", "cyclic3", "product"):
        sft = builtin_factor(name).sft
        cells = rng.integers(0, sft.alphabet_size, size=50)
        a = defect_projection(_win(cells, sft.alphabet_size, offset=-7), sft)
        b = defect_projection(_win(cells, sft.alphabet_size, offset=5), sft)
        assert b.offset - a.offset == 12 and np.array_equal(a.cells, b.cells)


def test_product_defects_alternate():
    sft = builtin_factor("product").sft
    rng = np.random.default_rng(3)
    rows = project_rows(rng.integers(0, 2, size=(200, 300)), sft)
    for row in rows:
        nz = row[row != 0]
        assert np.all(nz[1:] != nz[:-1])


@pytest.mark.parametrize("name", ["captive-identity", "captive-shift"])
def test_one_sided_captive_projection_is_not_balanced(name):
    sft = builtin_factor(name).sft
    d = estimate_asymptotic_variance(SamplerSpec.bernoulli([0.5, 0.5], seed=1), 50_000, 20,
                                     projection=lambda s: project_rows(s[None, :], sft)[0])
    assert d.verdict in ("mean_nonzero", "variance_zero")


def test_lifted_experiment_csv_has_factor_column():
    fac = builtin_factor("traffic")
    cdf = lifted_cdf_experiment(fac, SamplerSpec.bernoulli([0.5, 0.5], seed=1), 40, [0.5, 1], 200)
    lines = cdf.to_csv().splitlines()
    assert lines[0].endswith(",factor_name") and lines[1].endswith(",traffic")
    with pytest.raises(ValueError, match="alphabet"):
        lifted_cdf_experiment(fac, SamplerSpec.bernoulli([1 / 3] * 3), 40, [1], 10)


def test_lifted_matches_direct_projection_of_sampled_cells():
    """Kernel projection agrees with projecting then computing on the walk."""
    from gliders.entrytime import entry_time, experiment_window
    from gliders.measures import sample_cells
    from gliders.walks import partial_sums
    fac = builtin_factor("cyclic3")
    spec = SamplerSpec.bernoulli([0.2, 0.5, 0.3], seed=4)
    n, xs = 20, [3.0]
    cdf = lifted_cdf_experiment(fac, spec, n, xs, 60)
    lo, count = experiment_window(fac.target, n, 60, "minus", 2)
    for t in range(60):
        src = ConfigurationWindow(lo, sample_cells(spec, lo, lo + count - 1, t), 3)
        res = entry_time(partial_sums(defect_projection(src, fac.sft)), fac.target, n, 60)
        assert cdf.times[t] == (-1 if res.exceeds_horizon else res.value)
