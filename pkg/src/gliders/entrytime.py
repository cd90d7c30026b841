"""Entry times of particles into the origin window, exact and Monte Carlo.

``T_n^-(a)`` is the least ``k >= 0`` such that ``F^{n+k}(a)_i = -1`` for some
``i`` in ``[0, |v_minus| - 1]``; ``T_n^+`` is the mirror notion with ``+1``
and the window ``[0, v_plus - 1]``. A value above the horizon is reported as
``exceeds_horizon`` (the infinite case included).
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ca import ConfigurationWindow, GlidersRule, evolve_rows
from .kernels import as_seed, backend
from .measures import SamplerSpec
from .parallel import map_trials
from .walks import WalkPath

log = logging.getLogger(__name__)

SIDES = ("minus", "plus")
CSV_HEADER = ["x", "empirical", "theoretical", "stderr", "trials", "n", "v_minus", "v_plus",
              "side", "sampler_digest"]
EXCEEDS = -1


def _check_side(rule: GlidersRule, side: str) -> int:
    """Width of the origin window for ``side``."""
    if side not in SIDES:
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    if side == "plus":
        if rule.v_plus == 0:
            raise ValueError("entry times of speed-0 particles are not defined (v_plus = 0)")
        return rule.v_plus
    return -rule.v_minus


@dataclass(frozen=True)
class EntryTimeResult:
    value: Optional[int]
    horizon: int
    n: int
    side: str

    @property
    def exceeds_horizon(self) -> bool:
        return self.value is None

    def __post_init__(self):
        if self.value is not None and not 0 <= self.value <= self.horizon:
            raise ValueError("finite entry time must lie in [0, horizon]")


def dependence_cone(rule: GlidersRule, n: int, horizon: int, side: str = "minus") -> tuple[int, int]:
    """Walk domain ``[lo, hi]`` that decides ``T_n`` up to ``horizon``."""
    width = _check_side(rule, side)
    t = n + horizon
    lo = -rule.v_plus * t
    hi = -rule.v_minus * t + width
    return min(lo, 0), hi


def entry_time(walk: WalkPath, rule: GlidersRule, n: int, horizon: int,
               side: str = "minus") -> EntryTimeResult:
    """Entry time read off the walk with range-minimum queries."""
    width = _check_side(rule, side)
    if n < 0 or horizon < 0:
        raise ValueError("n and horizon must be nonnegative")
    lo, hi = dependence_cone(rule, n, horizon, side)
    if walk.lo > lo or walk.hi < hi:
        raise ValueError(
            f"walk domain [{walk.lo}, {walk.hi}] does not cover the required range [{lo}, {hi}]"
        )
    t = n + np.arange(horizon + 1, dtype=np.int64)[:, None]
    i = np.arange(width, dtype=np.int64)[None, :]
    first = i - rule.v_plus * t - walk.lo
    last = i - rule.v_minus * t + 1 - walk.lo
    values = walk.values
    if side == "minus":
        hit = values[last] < walk.rmq.query(first, last - 1)
    else:
        hit = values[first] < walk.rmq.query(first + 1, last)
    rows = np.flatnonzero(hit.any(axis=1))
    value = int(rows[0]) if rows.size else None
    return EntryTimeResult(value, horizon, n, side)


def entry_time_by_simulation(config: ConfigurationWindow, rule: GlidersRule, n: int,
                             horizon: int, side: str = "minus") -> EntryTimeResult:
    """Reference entry time from direct iteration of the automaton."""
    width = _check_side(rule, side)
    r = rule.radius
    total = n + horizon
    lo, hi = -r * total, width - 1 + r * total
    if config.offset > lo or config.stop - 1 < hi:
        raise ValueError(
            f"direct simulation needs cells on [{lo}, {hi}], got [{config.offset}, {config.stop - 1}]"
        )
    target = 0 if side == "minus" else 2
    cells = config.restrict(lo, hi).cells[None, :]
    local = rule.local_rule()
    cells = evolve_rows(cells, local, n)
    for k in range(horizon + 1):
        t = n + k
        start = r * (total - t)
        if np.any(cells[0, start:start + width] == target):
            return EntryTimeResult(k, horizon, n, side)
        if k < horizon:
            cells = local.apply_rows(cells)
    return EntryTimeResult(None, horizon, n, side)


def theoretical_cdf(rule: GlidersRule, x, side: str = "minus"):
    """Limit law of ``T_n / n`` at ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    vm, vp = rule.v_minus, rule.v_plus
    if side == "minus":
        ratio = -vm * x / (vp - vm + vp * x)
    elif side == "plus":
        _check_side(rule, side)
        ratio = vp * x / (vp - vm - vm * x)
    else:
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    out = 2.0 / np.pi * np.arctan(np.sqrt(ratio))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Projection:
    """Word-to-particle map applied before the walk: ``table[code(word)]``."""

    table: np.ndarray
    order: int
    alphabet_size: int
    name: str = ""

    @classmethod
    def identity(cls) -> "Projection":
        return cls(np.array([-1, 0, 1], dtype=np.int8), 1, 3, "")


def experiment_window(rule: GlidersRule, n: int, horizon: int, side: str, order: int = 1):
    """Source positions ``(lo, count)`` sampled per trial."""
    width = _check_side(rule, side)
    t = n + horizon
    lo = -rule.v_plus * t
    if side == "minus":
        hi = -rule.v_minus * t + width - 1
    else:
        hi = -rule.v_minus * t + rule.v_plus - 1
    return lo, hi - lo + 1 + order - 1


def sample_entry_times(sampler: SamplerSpec, rule: GlidersRule, n: int, horizon: int,
                       trial_ids, side: str = "minus", projection: Optional[Projection] = None,
                       workers: int = 1, backend_module=None) -> np.ndarray:
    """Entry time of each trial (``-1`` when above the horizon)."""
    _check_side(rule, side)
    if n < 1:
        raise ValueError("n must be at least 1")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    projection = projection or Projection.identity()
    if projection.alphabet_size != sampler.alphabet_size:
        raise ValueError("sampler alphabet does not match the projection alphabet")
    kern = backend_module or backend
    src_lo, n_src = experiment_window(rule, n, horizon, side, projection.order)
    kind, cum, cum_stat, cum_mat, word = sampler.kernel_args()
    seed = as_seed(sampler.seed)
    mirror = side == "plus"

    def run(ids):
        return kern.entry_times(seed, ids, kind, cum, cum_stat, cum_mat, word,
                                projection.table, projection.order, projection.alphabet_size,
                                src_lo, n_src, mirror, rule.v_minus, rule.v_plus, n, horizon)

    return map_trials(run, trial_ids, workers)


@dataclass
class EmpiricalCDF:
    xs: np.ndarray
    estimates: np.ndarray
    standard_errors: np.ndarray
    trials: int
    n: int
    rule: GlidersRule
    side: str
    sampler_digest: str
    factor_name: Optional[str] = None
    times: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def theoretical(self) -> np.ndarray:
        return np.asarray(theoretical_cdf(self.rule, self.xs, self.side), dtype=float)

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.estimates - self.theoretical)

    def rows(self):
        theo = self.theoretical
        for x, e, t, s in zip(self.xs, self.estimates, theo, self.standard_errors):
            row = [_fmt(x), _fmt(e), _fmt(t), _fmt(s), str(self.trials), str(self.n),
                   str(self.rule.v_minus), str(self.rule.v_plus), self.side, self.sampler_digest]
            if self.factor_name is not None:
                row.append(self.factor_name)
            yield row

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = CSV_HEADER + (["factor_name"] if self.factor_name is not None else [])
        w.writerow(header)
        w.writerows(self.rows())
        return buf.getvalue()


def _fmt(v) -> str:
    return format(float(v), ".6g")


def cdf_from_times(times: np.ndarray, xs: Sequence[float], n: int, rule: GlidersRule,
                   side: str, sampler_digest: str, factor_name: Optional[str] = None) -> EmpiricalCDF:
    xs = np.asarray(xs, dtype=np.float64)
    finite = times >= 0
    counts = np.array([np.count_nonzero(finite & (times <= n * x)) for x in xs])
    trials = times.size
    est = counts / trials
    se = np.sqrt(est * (1.0 - est) / trials)
    return EmpiricalCDF(xs, est, se, trials, n, rule, side, sampler_digest, factor_name, times)


def default_horizon(n: int, xs: Sequence[float]) -> int:
    return int(math.ceil(n * max(xs)))


def _check_grid(xs):
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0 or not np.all(np.isfinite(xs)) or np.any(xs < 0):
        raise ValueError("xs must be a nonempty grid of finite nonnegative reals")
    return xs


def run_cdf_experiment(sampler: SamplerSpec, rule: GlidersRule, n: int, xs: Sequence[float],
                       trials: int, side: str = "minus", workers: int = 1,
                       projection: Optional[Projection] = None,
                       first_trial: int = 0, horizon: Optional[int] = None) -> EmpiricalCDF:
    """Monte Carlo estimate of ``P(T_n / n <= x)`` on a grid, one entry time per trial.

    ``horizon`` defaults to ``ceil(n * max(xs))``, the smallest value that
    decides every grid point.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    xs = _check_grid(xs)
    needed = default_horizon(n, xs)
    if horizon is None:
        horizon = needed
    elif horizon < needed:
        raise ValueError(f"horizon {horizon} cannot decide x = {xs.max():g} at n = {n}; need {needed}")
    ids = np.arange(first_trial, first_trial + trials, dtype=np.int64)
    log.debug("entry-time experiment %s n=%d K=%d trials=%d", rule, n, horizon, trials)
    times = sample_entry_times(sampler, rule, n, horizon, ids, side, projection, workers)
    name = projection.name if projection is not None and projection.name else None
    return cdf_from_times(times, xs, n, rule, side, sampler.digest(), name)


def birkhoff_asymmetry_check(sampler: SamplerSpec, rule: GlidersRule, n: int, x: float,
                             trials: int, workers: int = 1) -> tuple[float, float]:
    """``(P(T_n^+ above horizon), P(T_n^-/n <= x))`` when -1 particles are in excess.

    The horizon is ``ceil(n x)`` for both sides.
    """
    if sampler.alphabet_size != 3:
        raise ValueError("the asymmetry check needs a gliders-alphabet sampler")
    marg = sampler.marginal()
    if not marg[0] > marg[2]:
        raise ValueError(
            f"sampler must favour -1 particles: mu([-1]) = {marg[0]:g}, mu([+1]) = {marg[2]:g}"
        )
    horizon = default_horizon(n, [x])
    ids = np.arange(trials, dtype=np.int64)
    plus = sample_entry_times(sampler, rule, n, horizon, ids, "plus", workers=workers)
    minus = sample_entry_times(sampler, rule, n, horizon, ids, "minus", workers=workers)
    frac_plus = float(np.mean(plus < 0))
    frac_minus = float(np.mean((minus >= 0) & (minus <= n * x)))
    return frac_plus, frac_minus
