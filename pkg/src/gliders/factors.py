"""Defect projections of cellular automata onto gliders automata.

A subshift of finite type of order ``r`` is given by forbidden words split
into ``forbidden_plus`` and ``forbidden_minus``. The projection sends cell
``j`` to +1 / -1 / 0 according to the class of the word ``a_j .. a_{j+r-1}``.
A :class:`FactorSpec` is only trusted after :func:`commutation_check` has
shown ``project(F(a)) == G(project(a))`` on every checked window.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .ca import GLIDERS_ALPHABET, ConfigurationWindow, GlidersRule, LocalRule, encode, decode
from .entrytime import EmpiricalCDF, Projection, run_cdf_experiment
from .kernels import backend
from .measures import SamplerSpec

# exhaustive width used to validate built-in factors at construction
VALIDATION_WIDTH = 8


@dataclass(frozen=True)
class SftSpec:
    alphabet_size: int
    order: int
    forbidden_plus: frozenset
    forbidden_minus: frozenset

    def __post_init__(self):
        plus = frozenset(tuple(int(c) for c in w) for w in self.forbidden_plus)
        minus = frozenset(tuple(int(c) for c in w) for w in self.forbidden_minus)
        if self.order < 1:
            raise ValueError("SFT order must be positive")
        if plus & minus:
            raise ValueError(f"words {sorted(plus & minus)} are both plus and minus defects")
        for w in plus | minus:
            if len(w) != self.order:
                raise ValueError(f"forbidden word {w} does not have length {self.order}")
            if min(w) < 0 or max(w) >= self.alphabet_size:
                raise ValueError(f"forbidden word {w} leaves the alphabet")
        object.__setattr__(self, "forbidden_plus", plus)
        object.__setattr__(self, "forbidden_minus", minus)

    def word_value(self, word) -> int:
        word = tuple(int(c) for c in word)
        if word in self.forbidden_plus:
            return 1
        if word in self.forbidden_minus:
            return -1
        return 0

    def projection_table(self) -> np.ndarray:
        """Signed image of every word, indexed by its base-``alphabet_size`` code."""
        table = np.zeros(self.alphabet_size ** self.order, dtype=np.int8)
        weights = self.alphabet_size ** np.arange(self.order - 1, -1, -1)
        for value, words in ((1, self.forbidden_plus), (-1, self.forbidden_minus)):
            for w in words:
                table[int(np.dot(weights, w))] = value
        return table

    def projection(self, name: str = "") -> Projection:
        return Projection(self.projection_table(), self.order, self.alphabet_size, name)


@dataclass(frozen=True)
class FactorSpec:
    name: str
    source_rule: LocalRule
    sft: SftSpec
    target: GlidersRule

    def __post_init__(self):
        if self.source_rule.alphabet_size != self.sft.alphabet_size:
            raise ValueError("source rule and SFT alphabets differ")

    def projection(self) -> Projection:
        return self.sft.projection(self.name)


def project_rows(cells: np.ndarray, sft: SftSpec) -> np.ndarray:
    """Signed projection of each row of a 2-D state array (length shrinks by ``order - 1``)."""
    cells = np.ascontiguousarray(cells, dtype=np.int8)
    return backend.project_words(cells, sft.projection_table(), sft.order, sft.alphabet_size)


def defect_projection(config: ConfigurationWindow, sft: SftSpec) -> ConfigurationWindow:
    """Gliders window whose cell ``j`` classifies the word starting at ``j``."""
    if config.alphabet_size != sft.alphabet_size:
        raise ValueError("configuration alphabet does not match the SFT")
    if len(config) < sft.order:
        raise ValueError(f"window of length {len(config)} is shorter than the SFT order {sft.order}")
    signed = project_rows(config.cells[None, :], sft)[0]
    return ConfigurationWindow(config.offset, encode(signed), GLIDERS_ALPHABET)


@dataclass
class CommutationReport:
    passed: bool
    checked: int
    counterexample: Optional[ConfigurationWindow] = None
    detail: str = ""


def _mismatch_rows(factor: FactorSpec, cells: np.ndarray) -> np.ndarray:
    """Rows where projecting after a source step differs from stepping after projecting."""
    r1 = factor.source_rule.radius
    r2 = factor.target.radius
    order = factor.sft.order
    width = cells.shape[1]
    big = max(r1, r2)
    if width - (order - 1) - 2 * big < 1:
        raise ValueError(f"width {width} is too small for one step of both paths")
    lifted = project_rows(factor.source_rule.apply_rows(cells), factor.sft)
    target = factor.target.local_rule()
    stepped = decode(target.apply_rows(encode(project_rows(cells, factor.sft))))
    # both start at absolute offset r1 resp. r2; compare on the common range
    a = lifted[:, big - r1: lifted.shape[1] - (big - r1)]
    b = stepped[:, big - r2: stepped.shape[1] - (big - r2)]
    return np.flatnonzero(np.any(a != b, axis=1))


def commutation_check(factor: FactorSpec, samples: int = 1000, width: int = 500,
                      rng: Optional[np.random.Generator] = None,
                      exhaustive: bool = False, batch: int = 4096) -> CommutationReport:
    """Compare ``project(F(a))`` with ``G(project(a))`` on sampled or all windows."""
    A = factor.sft.alphabet_size
    if exhaustive:
        total = A ** width
        def batches():
            for start in range(0, total, batch):
                codes = np.arange(start, min(total, start + batch), dtype=np.int64)
                yield (codes[:, None] // A ** np.arange(width - 1, -1, -1)) % A
    else:
        rng = rng if rng is not None else np.random.default_rng()
        total = samples
        def batches():
            for start in range(0, total, batch):
                yield rng.integers(0, A, size=(min(batch, total - start), width))
    checked = 0
    for cells in batches():
        cells = cells.astype(np.int8)
        bad = _mismatch_rows(factor, cells)
        if bad.size:
            ce = ConfigurationWindow(0, cells[bad[0]], A)
            return CommutationReport(False, checked + int(bad[0]) + 1, ce,
                                     f"{factor.name}: mismatch on window {cells[bad[0]].tolist()}")
        checked += cells.shape[0]
    return CommutationReport(True, checked)


def _validated(factor: FactorSpec) -> FactorSpec:
    report = commutation_check(factor, width=VALIDATION_WIDTH, exhaustive=True)
    if not report.passed:
        raise ValueError(f"declared factor does not commute: {report.detail}")
    return factor


# -- built-in automata -------------------------------------------------------

def _traffic(l, c, r):
    if l == 1 and c == 0:
        return 1
    if c == 1 and r == 1:
        return 1
    return 0


def traffic_rule() -> tuple[LocalRule, FactorSpec]:
    """Rule 184 with the checkerboard SFT: ``00`` moves right, ``11`` moves left."""
    rule = LocalRule.from_function(1, 2, _traffic, name="traffic")
    sft = SftSpec(2, 2, frozenset({(0, 0)}), frozenset({(1, 1)}))
    return rule, _validated(FactorSpec("traffic", rule, sft, GlidersRule(-1, 1)))


def _cyclic3(l, c, r):
    up = (c + 1) % 3
    return up if (l == up or r == up) else c


def cyclic3_rule() -> tuple[LocalRule, FactorSpec]:
    """3-state cyclic automaton with the monochromatic SFT.

    A boundary ``(u, u-1)`` moves right, ``(u, u+1)`` moves left.
    """
    rule = LocalRule.from_function(1, 3, _cyclic3, name="cyclic3")
    plus = frozenset({(1, 0), (0, 2), (2, 1)})
    minus = frozenset({(0, 1), (1, 2), (2, 0)})
    sft = SftSpec(3, 2, plus, minus)
    return rule, _validated(FactorSpec("cyclic3", rule, sft, GlidersRule(-1, 1)))


def captive_rule(choice: Callable[[int, int], int], alphabet_size: int = 2,
                 name: str = "captive") -> tuple[LocalRule, FactorSpec]:
    """One-sided captive automaton ``F(a)_j = choice(a_j, a_{j+1})``.

    The word ``ab`` (``a != b``) is a +1 defect (speed 0) when
    ``choice(a, b) == a`` and a -1 defect (speed -1) otherwise.
    """
    A = alphabet_size
    for a in range(A):
        for b in range(A):
            if choice(a, b) not in (a, b):
                raise ValueError(f"choice({a}, {b}) = {choice(a, b)} is neither argument")
    # radius-1 window (a_{j-1}, a_j, a_{j+1}); the left cell is ignored
    rule = LocalRule.from_function(1, A, lambda l, c, r: choice(c, r), name=name)
    plus = frozenset((a, b) for a in range(A) for b in range(A) if a != b and choice(a, b) == a)
    minus = frozenset((a, b) for a in range(A) for b in range(A) if a != b and choice(a, b) == b)
    sft = SftSpec(A, 2, plus, minus)
    return rule, _validated(FactorSpec(name, rule, sft, GlidersRule(-1, 0)))


def captive_identity() -> tuple[LocalRule, FactorSpec]:
    return captive_rule(lambda a, b: a, 2, name="captive-identity")


def captive_shift() -> tuple[LocalRule, FactorSpec]:
    return captive_rule(lambda a, b: b, 2, name="captive-shift")


def product_rule() -> tuple[LocalRule, FactorSpec]:
    """``f(a_-1, a_0, a_1) = a_-1 a_0 a_1``: blocks of 1s erode from both ends.

    The left edge ``01`` of a block moves right and the right edge ``10``
    moves left, so ``01`` is the +1 defect.
    """
    rule = LocalRule.from_function(1, 2, lambda l, c, r: l * c * r, name="product")
    sft = SftSpec(2, 2, frozenset({(0, 1)}), frozenset({(1, 0)}))
    return rule, _validated(FactorSpec("product", rule, sft, GlidersRule(-1, 1)))


BUILTINS: dict[str, Callable[[], tuple[LocalRule, FactorSpec]]] = {
    "traffic": traffic_rule,
    "cyclic3": cyclic3_rule,
    "captive-identity": captive_identity,
    "captive-shift": captive_shift,
    "product": product_rule,
}


@lru_cache(maxsize=None)
def builtin_factor(name: str) -> FactorSpec:
    try:
        return BUILTINS[name]()[1]
    except KeyError:
        raise ValueError(f"unknown factor {name!r}; expected one of {sorted(BUILTINS)}") from None


def lifted_cdf_experiment(factor: FactorSpec, sampler: SamplerSpec, n: int, xs, trials: int,
                          side: str = "minus", workers: int = 1,
                          horizon: Optional[int] = None) -> EmpiricalCDF:
    """Entry-time CDF of the defects, via the gliders machinery on the projected walk."""
    if sampler.alphabet_size != factor.sft.alphabet_size:
        raise ValueError("sampler must live on the source alphabet of the factor")
    return run_cdf_experiment(sampler, factor.target, n, xs, trials, side, workers,
                              projection=factor.projection(), horizon=horizon)
