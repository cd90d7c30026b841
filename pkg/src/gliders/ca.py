"""Finite configuration windows, local rules and the gliders automata.

Gliders configurations use the fixed state encoding

    -1 -> 0,   0 -> 1,   +1 -> 2

(``encode``/``decode``). Stepping uses shrinking windows: a window of
length L at offset o becomes a window of length L - 2r at offset o + r,
so no boundary cell is ever invented.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from .kernels import backend

GLIDERS_ALPHABET = 3
# largest radius whose rule is tabulated; 3**9 entries
MAX_TABLE_RADIUS = 4


def encode(signed) -> np.ndarray:
    return (np.asarray(signed, dtype=np.int8) + 1).astype(np.int8)


def decode(states) -> np.ndarray:
    return (np.asarray(states, dtype=np.int8) - 1).astype(np.int8)


@dataclass(frozen=True)
class ConfigurationWindow:
    """Cells ``offset .. offset+len(cells)-1`` of a bi-infinite configuration."""

    offset: int
    cells: np.ndarray
    alphabet_size: int = GLIDERS_ALPHABET

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int8).reshape(-1)
        if cells.size == 0:
            raise ValueError("a configuration window needs at least one cell")
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        if cells.min() < 0 or cells.max() >= self.alphabet_size:
            raise ValueError(f"states must lie in [0, {self.alphabet_size})")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def from_signed(cls, offset: int, values: Sequence[int]) -> "ConfigurationWindow":
        values = np.asarray(values)
        if values.size and (values.min() < -1 or values.max() > 1):
            raise ValueError("gliders cells must be -1, 0 or +1")
        return cls(offset, encode(values), GLIDERS_ALPHABET)

    def signed(self) -> np.ndarray:
        if self.alphabet_size != GLIDERS_ALPHABET:
            raise ValueError("signed view only exists for gliders configurations")
        return decode(self.cells)

    def __len__(self):
        return self.cells.shape[0]

    @property
    def stop(self) -> int:
        """One past the last absolute position."""
        return self.offset + len(self)

    def __getitem__(self, position: int) -> int:
        if not self.offset <= position < self.stop:
            raise IndexError(f"position {position} outside [{self.offset}, {self.stop})")
        return int(self.cells[position - self.offset])

    def restrict(self, lo: int, hi: int) -> "ConfigurationWindow":
        """Sub-window on absolute positions ``lo .. hi`` inclusive."""
        if lo < self.offset or hi >= self.stop or lo > hi:
            raise ValueError(f"[{lo}, {hi}] is not inside [{self.offset}, {self.stop - 1}]")
        return ConfigurationWindow(lo, self.cells[lo - self.offset:hi - self.offset + 1],
                                   self.alphabet_size)

    def shifted(self, by: int) -> "ConfigurationWindow":
        return ConfigurationWindow(self.offset + by, self.cells, self.alphabet_size)

    def __eq__(self, other):
        if not isinstance(other, ConfigurationWindow):
            return NotImplemented
        return (self.offset == other.offset and self.alphabet_size == other.alphabet_size
                and np.array_equal(self.cells, other.cells))

    __hash__ = None


@dataclass(frozen=True)
class GlidersRule:
    """The (v_minus, v_plus)-gliders automaton: -1 particles move at v_minus, +1 at v_plus."""

    v_minus: int
    v_plus: int

    def __post_init__(self):
        if not self.v_minus < 0:
            raise ValueError(f"v_minus must be negative (got {self.v_minus})")
        if not self.v_plus >= 0:
            raise ValueError(f"v_plus must be nonnegative (got {self.v_plus})")

    @property
    def radius(self) -> int:
        return max(-self.v_minus, self.v_plus)

    def local_rule(self) -> "LocalRule":
        return _gliders_local_rule_cached(self.v_minus, self.v_plus)

    def __str__(self):
        return f"({self.v_minus},{self.v_plus})-GA"


@dataclass(frozen=True)
class LocalRule:
    """A radius-r local rule, either tabulated or given as a vectorized function.

    ``table[code]`` holds the image of the window whose base-``alphabet_size``
    code (leftmost cell most significant) is ``code``. ``func`` maps an
    ``(N, 2r+1)`` array of windows to ``N`` states.
    """

    radius: int
    alphabet_size: int
    table: Optional[np.ndarray] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if (self.table is None) == (self.func is None):
            raise ValueError("give exactly one of table / func")
        if self.table is not None:
            table = np.array(self.table, dtype=np.int8)
            if table.shape != (self.alphabet_size ** (2 * self.radius + 1),):
                raise ValueError("table size must be alphabet_size ** (2*radius+1)")
            if table.min() < 0 or table.max() >= self.alphabet_size:
                raise ValueError("rule table leaves the alphabet")
            table.flags.writeable = False
            object.__setattr__(self, "table", table)

    @property
    def span(self) -> int:
        return 2 * self.radius + 1

    @classmethod
    def from_function(cls, radius: int, alphabet_size: int, f: Callable[..., int],
                      name: str = "") -> "LocalRule":
        """Tabulate a rule given cell-by-cell as ``f(a_-r, ..., a_r)``."""
        span = 2 * radius + 1
        table = np.empty(alphabet_size ** span, dtype=np.int8)
        for code, window in enumerate(product(range(alphabet_size), repeat=span)):
            table[code] = f(*window)
        return cls(radius, alphabet_size, table=table, name=name)

    def apply_windows(self, windows: np.ndarray) -> np.ndarray:
        windows = np.asarray(windows)
        if windows.shape[-1] != self.span:
            raise ValueError(f"windows must have length {self.span}")
        if self.table is not None:
            weights = self.alphabet_size ** np.arange(self.span - 1, -1, -1, dtype=np.int64)
            return self.table[windows.astype(np.int64) @ weights]
        out = np.asarray(self.func(windows.reshape(-1, self.span)), dtype=np.int8)
        return out.reshape(windows.shape[:-1])

    def apply_rows(self, cells: np.ndarray) -> np.ndarray:
        """One shrinking step on every row of a 2-D state array."""
        cells = np.ascontiguousarray(cells, dtype=np.int8)
        if cells.shape[-1] <= 2 * self.radius:
            raise ValueError(f"window of length {cells.shape[-1]} is too short for radius {self.radius}")
        if self.table is not None:
            return backend.apply_table(cells, self.table, self.radius, self.alphabet_size)
        windows = np.lib.stride_tricks.sliding_window_view(cells, self.span, axis=-1)
        return self.apply_windows(windows).astype(np.int8)


def _gliders_conditions(windows: np.ndarray, v_minus: int, v_plus: int) -> np.ndarray:
    """Vectorized gliders rule on signed windows of shape (N, 2r+1); column r is cell 0."""
    w = np.asarray(windows, dtype=np.int64)
    r = (w.shape[-1] - 1) // 2
    m = -v_minus
    # +1: a_{-v+} = +1 and every prefix sum of a_{-v+ +1 .. N}, N <= m, is >= 0
    pre = np.cumsum(w[:, r - v_plus + 1:r + m + 1], axis=1)
    plus = w[:, r - v_plus] == 1
    if pre.shape[1]:
        plus &= pre.min(axis=1) >= 0
    # -1: a_{m} = -1 and every suffix sum of a_{N .. m-1}, N >= -v+, is <= 0
    seg = w[:, r - v_plus:r + m]
    suf = np.cumsum(seg[:, ::-1], axis=1)
    minus = w[:, r + m] == -1
    if suf.shape[1]:
        minus &= suf.max(axis=1) <= 0
    out = np.zeros(w.shape[0], dtype=np.int8)
    out[plus] = 1
    out[minus] = -1
    return out


def gliders_local_rule(rule: GlidersRule, window: Sequence[int]) -> int:
    """Image of the signed window ``(a_-r, ..., a_r)`` under the gliders rule."""
    window = np.asarray(window, dtype=np.int64)
    if window.shape != (2 * rule.radius + 1,):
        raise ValueError(f"window must have length {2 * rule.radius + 1}, got {window.shape}")
    return int(_gliders_conditions(window[None, :], rule.v_minus, rule.v_plus)[0])


_RULE_CACHE: dict = {}


def _gliders_local_rule_cached(v_minus: int, v_plus: int) -> LocalRule:
    key = (v_minus, v_plus)
    if key not in _RULE_CACHE:
        r = max(-v_minus, v_plus)
        name = f"({v_minus},{v_plus})-GA"
        if r <= MAX_TABLE_RADIUS:
            span = 2 * r + 1
            codes = np.arange(GLIDERS_ALPHABET ** span, dtype=np.int64)
            digits = (codes[:, None] // GLIDERS_ALPHABET ** np.arange(span - 1, -1, -1)) % GLIDERS_ALPHABET
            table = encode(_gliders_conditions(digits - 1, v_minus, v_plus))
            _RULE_CACHE[key] = LocalRule(r, GLIDERS_ALPHABET, table=table, name=name)
        else:
            def func(windows, vm=v_minus, vp=v_plus):
                return encode(_gliders_conditions(np.asarray(windows, dtype=np.int64) - 1, vm, vp))
            _RULE_CACHE[key] = LocalRule(r, GLIDERS_ALPHABET, func=func, name=name)
    return _RULE_CACHE[key]


def _as_local(rule) -> LocalRule:
    return rule.local_rule() if isinstance(rule, GlidersRule) else rule


def step(config: ConfigurationWindow, rule) -> ConfigurationWindow:
    """Apply the automaton once; the result is ``radius`` cells shorter on each side."""
    rule = _as_local(rule)
    if config.alphabet_size != rule.alphabet_size:
        raise ValueError("configuration and rule alphabets differ")
    if len(config) <= 2 * rule.radius:
        raise ValueError(
            f"window of length {len(config)} is too short for radius {rule.radius}; "
            f"need at least {2 * rule.radius + 1} cells"
        )
    out = rule.apply_rows(config.cells[None, :])[0]
    return ConfigurationWindow(config.offset + rule.radius, out, config.alphabet_size)


def simulate(config: ConfigurationWindow, rule, steps: int) -> list[ConfigurationWindow]:
    """Space-time diagram ``[config, F(config), ..., F^steps(config)]`` on shrinking windows."""
    rule = _as_local(rule)
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    need = 2 * rule.radius * steps + 1
    if len(config) < need:
        raise ValueError(
            f"{steps} steps at radius {rule.radius} need a window of at least {need} cells, "
            f"got {len(config)}"
        )
    diagram = [config]
    for _ in range(steps):
        diagram.append(step(diagram[-1], rule))
    return diagram


def evolve(config: ConfigurationWindow, rule, steps: int) -> ConfigurationWindow:
    """``F^steps(config)`` without keeping the intermediate rows."""
    rule = _as_local(rule)
    need = 2 * rule.radius * steps + 1
    if len(config) < need:
        raise ValueError(f"need a window of at least {need} cells, got {len(config)}")
    cells = config.cells[None, :]
    for _ in range(steps):
        cells = rule.apply_rows(cells)
    return ConfigurationWindow(config.offset + rule.radius * steps, cells[0], config.alphabet_size)


def evolve_rows(cells: np.ndarray, rule, steps: int) -> np.ndarray:
    """Batch version of :func:`evolve` on a 2-D array (one configuration per row)."""
    rule = _as_local(rule)
    cells = np.ascontiguousarray(cells, dtype=np.int8)
    for _ in range(steps):
        cells = rule.apply_rows(cells)
    return cells


# -- rendering ---------------------------------------------------------------

DEFAULT_CHARS = {-1: "-", 0: ".", 1: "+"}


def render_ascii(diagram: Sequence[ConfigurationWindow], chars: Optional[dict] = None) -> str:
    """Text diagram, one row per time step.

    The latest time is printed first, so read bottom-up time runs upward.
    Rows are aligned on absolute position; cells outside a row's window are blank.
    Gliders rows use ``chars`` keyed by signed state, other alphabets print digits.
    """
    chars = {**DEFAULT_CHARS, **(chars or {})}
    lo = min(c.offset for c in diagram)
    hi = max(c.stop for c in diagram)
    lines = []
    for row in reversed(diagram):
        if row.alphabet_size == GLIDERS_ALPHABET:
            body = "".join(chars[int(v)] for v in row.signed())
        else:
            body = "".join(str(int(v)) for v in row.cells)
        lines.append(" " * (row.offset - lo) + body + " " * (hi - row.stop))
    return "\n".join(lines) + "\n"


def _gray_levels(alphabet_size: int) -> np.ndarray:
    if alphabet_size == GLIDERS_ALPHABET:
        return np.array([0, 128, 255], dtype=np.uint8)
    if alphabet_size == 1:
        return np.array([255], dtype=np.uint8)
    return np.round(np.linspace(0, 255, alphabet_size)).astype(np.uint8)


def diagram_pixels(diagram: Sequence[ConfigurationWindow]) -> np.ndarray:
    """Gray image of a diagram, latest time in the top row.

    Gliders states map to 0 / 128 / 255 for -1 / 0 / +1. Positions outside a
    shrunken row are filled with the background gray of state 0.
    """
    alphabet = diagram[0].alphabet_size
    levels = _gray_levels(alphabet)
    lo = min(c.offset for c in diagram)
    hi = max(c.stop for c in diagram)
    fill = levels[1] if alphabet == GLIDERS_ALPHABET else levels[0]
    img = np.full((len(diagram), hi - lo), fill, dtype=np.uint8)
    for t, row in enumerate(reversed(diagram)):
        img[t, row.offset - lo:row.stop - lo] = levels[row.cells]
    return img


def write_pgm(path, diagram: Sequence[ConfigurationWindow]) -> None:
    """Binary PGM (P5), one pixel per cell."""
    img = diagram_pixels(diagram)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)
