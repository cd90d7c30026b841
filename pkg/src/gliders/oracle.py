"""Brownian minima comparisons and their random-walk surrogates.

For independent standard Brownian motions ``B^l`` and ``B^r``,
``P(min_[0,y] B^l < min_[0,z] B^r) = (2/pi) arctan sqrt(y/z)``. The Monte
Carlo surrogate replaces each motion by a centered lattice walk.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .kernels import as_seed, backend
from .parallel import map_trials
from .rng import LANE_LEFT_WALK, LANE_RIGHT_WALK

ORACLE_HEADER = ["y", "z", "epsilon", "closed_form", "empirical", "stderr", "walk_steps", "trials"]
MIN_WALK_STEPS = 1000
# three-point increments are drawn from 16-bit slices
THREE_POINT_RESOLUTION = 1 << 16


@dataclass(frozen=True)
class MinimaComparisonParams:
    y: float
    z: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not (self.y > 0 and self.z > 0):
            raise ValueError(f"interval lengths must be positive (y={self.y}, z={self.z})")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")


@dataclass(frozen=True)
class IncrementSpec:
    """Walk increments: fair +-1, or the three-point law ``(p, 1-2p, p)`` on ``(-1, 0, +1)``."""

    kind: str = "fair"
    p: float = 0.5

    def __post_init__(self):
        if self.kind not in ("fair", "three_point"):
            raise ValueError(f"unknown increment kind {self.kind!r}")
        if self.kind == "three_point":
            if not 0.0 <= self.p <= 0.5:
                raise ValueError("three-point mass p must lie in [0, 1/2]")
            if self.threshold == 0:
                raise ValueError("degenerate increment law: zero variance")

    @classmethod
    def fair(cls) -> "IncrementSpec":
        return cls("fair", 0.5)

    @classmethod
    def three_point(cls, p: float) -> "IncrementSpec":
        return cls("three_point", p)

    @property
    def threshold(self) -> int:
        return int(round(self.p * THREE_POINT_RESOLUTION))

    @property
    def kernel_code(self) -> int:
        return 0 if self.kind == "fair" else 1

    @property
    def variance(self) -> float:
        if self.kind == "fair":
            return 1.0
        return 2.0 * self.threshold / THREE_POINT_RESOLUTION


def minima_comparison_probability(params: MinimaComparisonParams) -> float:
    if params.epsilon > 0:
        raise ValueError("no closed form with a positive offset; use simulate_minima_comparison")
    return 2.0 / math.pi * math.atan(math.sqrt(params.y / params.z))


def brownian_min_density(m: float) -> float:
    """Density of ``min_[0,1] B`` at ``m <= 0``."""
    if m > 0:
        raise ValueError("the minimum of a Brownian path started at 0 is nonpositive")
    return 2.0 / math.sqrt(2.0 * math.pi) * math.exp(-0.5 * m * m)


def walk_minima(steps: int, trials, seed: int, lane: int = LANE_LEFT_WALK,
                increment: IncrementSpec = IncrementSpec(), workers: int = 1) -> np.ndarray:
    """Running minimum (including the start 0) of one walk per trial id."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    s = as_seed(seed)
    code, thr = increment.kernel_code, increment.threshold

    def run(ids):
        return backend.walk_minima(s, ids, steps, lane, code, thr)

    return map_trials(run, np.asarray(trials, dtype=np.int64), workers)


@dataclass(frozen=True)
class MinimaComparisonResult:
    params: MinimaComparisonParams
    empirical: float
    stderr: float
    walk_steps: int
    trials: int

    @property
    def closed_form(self) -> float:
        return 2.0 / math.pi * math.atan(math.sqrt(self.params.y / self.params.z))

    def row(self) -> list[str]:
        f = lambda v: format(float(v), ".6g")
        p = self.params
        return [f(p.y), f(p.z), f(p.epsilon), f(self.closed_form), f(self.empirical),
                f(self.stderr), str(self.walk_steps), str(self.trials)]


def simulate_minima_comparison(params: MinimaComparisonParams, walk_steps: int, trials: int,
                               seed: int = 0, increment: IncrementSpec = IncrementSpec(),
                               workers: int = 1) -> MinimaComparisonResult:
    """Fraction of trials with ``min(left) - eps sqrt(N) < min(right)``; ties are not less."""
    if walk_steps < MIN_WALK_STEPS:
        raise ValueError(f"walk_steps must be at least {MIN_WALK_STEPS}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ids = np.arange(trials, dtype=np.int64)
    left = walk_minima(math.ceil(params.y * walk_steps), ids, seed, LANE_LEFT_WALK, increment, workers)
    right = walk_minima(math.ceil(params.z * walk_steps), ids, seed, LANE_RIGHT_WALK, increment, workers)
    shift = params.epsilon * math.sqrt(increment.variance * walk_steps)
    hits = np.count_nonzero(left - shift < right)
    est = hits / trials
    return MinimaComparisonResult(params, est, math.sqrt(est * (1 - est) / trials), walk_steps, trials)


def oracle_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ORACLE_HEADER)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()
