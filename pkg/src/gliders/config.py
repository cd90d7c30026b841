"""Line-oriented experiment configs.

A config is one ``[command]`` section followed by ``key = value`` lines.
``#`` starts a comment, lists are comma separated, and matrix rows are
separated by ``;``::

    [entrytime]
    rule = -1, 0            # (v_minus, v_plus)
    sampler = bernoulli
    probs = 0.5, 0, 0.5     # masses of -1, 0, +1
    n = 2000
    trials = 20000
    xs = 0.25, 0.5, 1, 2, 4
    seed = 1

Sampler words are written in the sampler's own symbols: signed cells
(-1, 0, 1) for gliders commands, source states (0, 1, ...) when a factor
is named.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .ca import GLIDERS_ALPHABET, GlidersRule
from .factors import BUILTINS, FactorSpec, builtin_factor
from .measures import SamplerSpec

COMMANDS = ("simulate", "entrytime", "factor-entrytime", "factor-check", "oracle", "mix-diagnose")
REQUIRED = object()


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# -- value types ---------------------------------------------------------------

def _int(text):
    return int(text.strip())


def _float(text):
    return float(text.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {text.strip()!r}")


def _str(text):
    t = text.strip()
    if not t:
        raise ValueError("empty value")
    return t


def _list(conv):
    def parse(text):
        items = [s for s in (p.strip() for p in text.split(",")) if s]
        if not items:
            raise ValueError("empty list")
        return tuple(conv(s) for s in items)
    return parse


def _matrix(text):
    return tuple(_list(_float)(row) for row in text.split(";"))


def _fmt_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _fmt(v):
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return "; ".join(", ".join(_fmt_scalar(x) for x in row) for row in v)
    if isinstance(v, tuple):
        return ", ".join(_fmt_scalar(x) for x in v)
    return _fmt_scalar(v)


@dataclass(frozen=True)
class Key:
    name: str
    parse: Callable[[str], Any]
    default: Any = REQUIRED
    kind: str = ""


def _horizon(text):
    t = text.strip().lower()
    return "auto" if t == "auto" else _int(t)


def _oneof(*choices):
    def parse(text):
        t = text.strip()
        if t not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}, got {t!r}")
        return t
    return parse


COMMON = [
    Key("seed", _int, 0, "integer"),
    Key("workers", _int, 1, "integer"),
]
SAMPLER = [
    Key("sampler", _oneof("bernoulli", "markov", "dirac_periodic"), REQUIRED, "sampler kind"),
    Key("probs", _list(_float), None, "list of reals"),
    Key("matrix", _matrix, None, "matrix"),
    Key("word", _list(_int), None, "list of integers"),
    Key("uniform_phase", _bool, True, "boolean"),
]
RULE = [Key("rule", _list(_int), REQUIRED, "pair of integers")]
FACTOR = [Key("factor", _oneof(*BUILTINS), REQUIRED, "factor name")]
GRID = [
    Key("n", _int, REQUIRED, "integer"),
    Key("xs", _list(_float), REQUIRED, "list of reals"),
    Key("trials", _int, REQUIRED, "integer"),
    Key("side", _oneof("minus", "plus"), "minus", "side"),
    Key("horizon", _horizon, "auto", "integer or auto"),
]

SCHEMAS: dict[str, list[Key]] = {
    "simulate": [Key("rule", _list(_int), None, "pair of integers"),
                 Key("factor", _oneof(*BUILTINS), None, "factor name")] + SAMPLER + [
        Key("width", _int, REQUIRED, "integer"),
        Key("steps", _int, REQUIRED, "integer"),
        Key("trial", _int, 0, "integer"),
        Key("pgm", _str, "diagram.pgm", "path"),
        Key("ascii", _str, "diagram.txt", "path"),
    ] + COMMON,
    "entrytime": RULE + SAMPLER + GRID + [Key("csv", _str, "entrytime.csv", "path")] + COMMON,
    "factor-entrytime": FACTOR + SAMPLER + GRID + [Key("csv", _str, "factor-entrytime.csv", "path")] + COMMON,
    "factor-check": FACTOR + [
        Key("width", _int, 500, "integer"),
        Key("samples", _int, 1000, "integer"),
        Key("exhaustive_width", _int, 0, "integer"),
        Key("csv", _str, "factor-check.csv", "path"),
    ] + COMMON,
    "oracle": [
        Key("y", _list(_float), REQUIRED, "list of reals"),
        Key("z", _list(_float), REQUIRED, "list of reals"),
        Key("epsilon", _float, 0.0, "real"),
        Key("walk_steps", _int, REQUIRED, "integer"),
        Key("trials", _int, REQUIRED, "integer"),
        Key("increment", _oneof("fair", "three_point"), "fair", "increment kind"),
        Key("p", _float, 0.25, "real"),
        Key("csv", _str, "oracle.csv", "path"),
    ] + COMMON,
    "mix-diagnose": [Key("factor", _oneof(*BUILTINS), None, "factor name")] + SAMPLER + [
        Key("sample_length", _int, REQUIRED, "integer"),
        Key("lag", _int, REQUIRED, "integer"),
        Key("trial", _int, 0, "integer"),
        Key("csv", _str, "mix-diagnose.csv", "path"),
    ] + COMMON,
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    values: dict
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def with_overrides(self, **kw) -> "ExperimentConfig":
        values = dict(self.values)
        values.update({k: v for k, v in kw.items() if v is not None})
        cfg = ExperimentConfig(self.command, values, self.lines)
        validate(cfg)
        return cfg

    # -- resolved objects ----------------------------------------------------
    def rule(self) -> Optional[GlidersRule]:
        pair = self.values.get("rule")
        if pair is None:
            return None
        return GlidersRule(*pair)

    def factor(self) -> Optional[FactorSpec]:
        name = self.values.get("factor")
        return None if name is None else builtin_factor(name)

    def sampler(self) -> SamplerSpec:
        fac = self.factor()
        alphabet = fac.sft.alphabet_size if fac is not None else GLIDERS_ALPHABET
        kind = self.values["sampler"]
        seed = self.values["seed"]
        if kind == "bernoulli":
            return SamplerSpec("bernoulli", alphabet, probs=self.values["probs"], seed=seed)
        if kind == "markov":
            return SamplerSpec("markov", alphabet, matrix=self.values["matrix"], seed=seed)
        word = self.values["word"]
        if fac is None:
            word = tuple(v + 1 for v in word)
        return SamplerSpec("dirac_periodic", alphabet, word=word,
                           uniform_phase=self.values["uniform_phase"], seed=seed)

    def serialize(self) -> str:
        out = [f"[{self.command}]"]
        for key in SCHEMAS[self.command]:
            v = self.values.get(key.name)
            if v is not None:
                out.append(f"{key.name} = {_fmt(v)}")
        return "\n".join(out) + "\n"

    def digest(self) -> str:
        """Hash of the serialized config; the worker count is left out since it cannot change results."""
        text = "\n".join(l for l in self.serialize().splitlines() if not l.startswith("workers ="))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def parse_config(text: str) -> ExperimentConfig:
    command = None
    header_line = None
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            if command is not None:
                raise ConfigError("only one [command] section is allowed", lineno)
            command = line[1:-1].strip()
            header_line = lineno
            if command not in COMMANDS:
                raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}",
                                  lineno)
            continue
        if command is None:
            raise ConfigError("key before the [command] section header", lineno)
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first set on line {raw[key][1]})", lineno)
        raw[key] = (value, lineno)
    if command is None:
        raise ConfigError("missing [command] section header")

    schema = {k.name: k for k in SCHEMAS[command]}
    values, lines = {}, {}
    for key, (text_value, lineno) in raw.items():
        spec = schema.get(key)
        if spec is None:
            raise ConfigError(f"unknown key {key!r} for command {command!r}", lineno)
        try:
            values[key] = spec.parse(text_value)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected {spec.kind} ({exc})", lineno) from None
        lines[key] = lineno
    for spec in SCHEMAS[command]:
        if spec.name not in values:
            if spec.default is REQUIRED:
                raise ConfigError(f"missing required key {spec.name!r} in section [{command}]",
                                  header_line)
            values[spec.name] = spec.default
    cfg = ExperimentConfig(command, values, lines)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Range and consistency checks; raises :class:`ConfigError` naming the line."""
    v, at = cfg.values, cfg.lines.get

    def fail(msg, key):
        raise ConfigError(msg, at(key))

    def positive(key):
        if v.get(key) is not None and v[key] < 1:
            fail(f"{key} must be ≥ 1", key)

    if v.get("seed") is not None and not 0 <= v["seed"] < 2 ** 64:
        fail("seed must be an unsigned 64-bit integer", "seed")
    positive("workers")
    positive("trials")
    if cfg.command == "simulate":
        if (v.get("rule") is None) == (v.get("factor") is None):
            raise ConfigError("simulate needs exactly one of 'rule' or 'factor'",
                              at("rule") or at("factor"))
        positive("width")
        if v["steps"] < 0:
            fail("steps must be ≥ 0", "steps")
    if v.get("rule") is not None:
        pair = v["rule"]
        if len(pair) != 2:
            fail("rule must be a pair 'v_minus, v_plus'", "rule")
        if pair[0] >= 0:
            fail(f"v_minus must be negative (got {pair[0]}): the -1 particles must move left", "rule")
        if pair[1] < 0:
            fail(f"v_plus must be nonnegative (got {pair[1]})", "rule")
    if "xs" in v:
        if any(x < 0 for x in v["xs"]):
            fail("xs must be nonnegative", "xs")
        positive("n")
        if v["horizon"] != "auto" and v["horizon"] < 0:
            fail("horizon must be ≥ 0 or auto", "horizon")
    if "sampler" in v:
        kind = v["sampler"]
        needs = {"bernoulli": "probs", "markov": "matrix", "dirac_periodic": "word"}[kind]
        if v.get(needs) is None:
            fail(f"sampler {kind} needs the key {needs!r}", "sampler")
        try:
            cfg.sampler()
        except ValueError as exc:
            fail(str(exc), needs)
    if cfg.command == "oracle":
        if len(v["y"]) != len(v["z"]):
            fail("y and z must have the same length", "z")
        if any(t <= 0 for t in v["y"] + v["z"]):
            fail("interval lengths y, z must be positive", "y")
        if v["epsilon"] < 0:
            fail("epsilon must be ≥ 0", "epsilon")
        if v["walk_steps"] < 1000:
            fail("walk_steps must be ≥ 1000", "walk_steps")
    if cfg.command == "factor-check":
        positive("width")
        if v["samples"] < 0:
            fail("samples must be ≥ 0", "samples")
        if v["exhaustive_width"] < 0:
            fail("exhaustive_width must be ≥ 0", "exhaustive_width")
    if cfg.command == "mix-diagnose":
        positive("sample_length")
        if not 0 <= v["lag"] < v["sample_length"]:
            fail("lag must lie in [0, sample_length)", "lag")
