"""Initial measures: Bernoulli, 2-step Markov and Dirac-periodic samplers.

States are always the encoded alphabet ``0 .. alphabet_size-1``. For gliders
experiments that means probability vectors are ordered ``(-1, 0, +1)``;
:meth:`SamplerSpec.gliders_bernoulli` takes the three masses by name.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .ca import GLIDERS_ALPHABET, ConfigurationWindow, decode
from .kernels import as_seed, backend, KIND_BERNOULLI, KIND_MARKOV, KIND_PERIODIC, KIND_PERIODIC_PHASE

KINDS = ("bernoulli", "markov", "dirac_periodic")
PROB_TOL = 1e-12
STATIONARY_TOL = 1e-10


def stationary_vector(matrix) -> np.ndarray:
    """Left eigenvector of a stochastic matrix for eigenvalue 1, normalized to sum 1."""
    matrix = np.asarray(matrix, dtype=float)
    w, v = np.linalg.eig(matrix.T)
    vec = np.real(v[:, np.argmin(np.abs(w - 1.0))])
    vec = vec / vec.sum()
    return np.clip(vec, 0.0, None) / np.clip(vec, 0.0, None).sum()


def _cumulative(p) -> np.ndarray:
    cum = np.cumsum(np.asarray(p, dtype=np.float64), axis=-1)
    cum[..., -1] = 1.0
    return cum


@dataclass(frozen=True)
class SamplerSpec:
    kind: str
    alphabet_size: int = GLIDERS_ALPHABET
    probs: Optional[tuple] = None
    matrix: Optional[tuple] = None
    stationary: Optional[tuple] = None
    word: Optional[tuple] = None
    uniform_phase: bool = True
    seed: int = 0
    _arrays: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}; expected one of {KINDS}")
        A = self.alphabet_size
        if A < 1:
            raise ValueError("alphabet_size must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        empty = np.zeros(1)
        arrays = dict(cum=empty, cum_stat=empty, cum_mat=np.ones((1, 1)),
                      word=np.zeros(1, dtype=np.int8))
        if self.kind == "bernoulli":
            p = np.asarray(self.probs, dtype=float)
            if p.shape != (A,):
                raise ValueError(f"bernoulli needs {A} probabilities, got {p.shape}")
            _check_prob(p, "bernoulli probabilities")
            object.__setattr__(self, "probs", tuple(float(x) for x in p))
            arrays["cum"] = _cumulative(p)
        elif self.kind == "markov":
            P = np.asarray(self.matrix, dtype=float)
            if P.shape != (A, A):
                raise ValueError(f"markov matrix must be {A}x{A}, got {P.shape}")
            for row in P:
                _check_prob(row, "markov matrix row")
            pi = stationary_vector(P) if self.stationary is None else np.asarray(self.stationary, float)
            _check_prob(pi, "stationary vector")
            if np.abs(pi @ P - pi).max() > STATIONARY_TOL:
                raise ValueError("stationary vector does not satisfy pi P = pi")
            object.__setattr__(self, "matrix", tuple(tuple(float(x) for x in r) for r in P))
            object.__setattr__(self, "stationary", tuple(float(x) for x in pi))
            arrays["cum_stat"] = _cumulative(pi)
            arrays["cum_mat"] = _cumulative(P)
        else:
            w = np.asarray(self.word, dtype=np.int64)
            if w.ndim != 1 or w.size == 0:
                raise ValueError("dirac_periodic needs a nonempty word")
            if w.min() < 0 or w.max() >= A:
                raise ValueError("word letters must lie in the alphabet")
            object.__setattr__(self, "word", tuple(int(x) for x in w))
            arrays["word"] = w.astype(np.int8)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "_arrays", arrays)

    # -- constructors ------------------------------------------------------
    @classmethod
    def bernoulli(cls, probs: Sequence[float], seed: int = 0) -> "SamplerSpec":
        return cls("bernoulli", len(probs), probs=tuple(probs), seed=seed)

    @classmethod
    def gliders_bernoulli(cls, p_minus: float, p_zero: float, p_plus: float,
                          seed: int = 0) -> "SamplerSpec":
        return cls("bernoulli", GLIDERS_ALPHABET, probs=(p_minus, p_zero, p_plus), seed=seed)

    @classmethod
    def markov(cls, matrix, stationary=None, seed: int = 0) -> "SamplerSpec":
        matrix = tuple(tuple(r) for r in matrix)
        return cls("markov", len(matrix), matrix=matrix,
                   stationary=None if stationary is None else tuple(stationary), seed=seed)

    @classmethod
    def dirac_periodic(cls, word: Sequence[int], alphabet_size: int = GLIDERS_ALPHABET,
                       uniform_phase: bool = True, seed: int = 0) -> "SamplerSpec":
        return cls("dirac_periodic", alphabet_size, word=tuple(word),
                   uniform_phase=uniform_phase, seed=seed)

    @classmethod
    def gliders_dirac(cls, signed_word: Sequence[int], uniform_phase: bool = True,
                      seed: int = 0) -> "SamplerSpec":
        return cls.dirac_periodic([int(v) + 1 for v in signed_word], GLIDERS_ALPHABET,
                                  uniform_phase, seed)

    def with_seed(self, seed: int) -> "SamplerSpec":
        return SamplerSpec(self.kind, self.alphabet_size, self.probs, self.matrix,
                           self.stationary, self.word, self.uniform_phase, seed)

    # -- properties --------------------------------------------------------
    @property
    def kind_code(self) -> int:
        if self.kind == "bernoulli":
            return KIND_BERNOULLI
        if self.kind == "markov":
            return KIND_MARKOV
        return KIND_PERIODIC_PHASE if self.uniform_phase else KIND_PERIODIC

    def kernel_args(self):
        a = self._arrays
        return self.kind_code, a["cum"], a["cum_stat"], a["cum_mat"], a["word"]

    def marginal(self) -> np.ndarray:
        """One-cell marginal law."""
        if self.kind == "bernoulli":
            return np.asarray(self.probs)
        if self.kind == "markov":
            return np.asarray(self.stationary)
        counts = np.bincount(np.asarray(self.word), minlength=self.alphabet_size)
        return counts / counts.sum()

    def describe(self) -> dict:
        d = {"kind": self.kind, "alphabet_size": self.alphabet_size, "seed": self.seed}
        if self.kind == "bernoulli":
            d["probs"] = list(self.probs)
        elif self.kind == "markov":
            d["matrix"] = [list(r) for r in self.matrix]
            d["stationary"] = list(self.stationary)
        else:
            d["word"] = list(self.word)
            d["uniform_phase"] = self.uniform_phase
        return d

    def digest(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _check_prob(p, what):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{what} must be nonnegative and sum to 1 (got {p.tolist()})")


def sample_cells(spec: SamplerSpec, lo: int, hi: int, trial_id: int) -> np.ndarray:
    """Encoded states on ``lo .. hi`` inclusive; pure function of its arguments."""
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if trial_id < 0:
        raise ValueError("trial_id must be nonnegative")
    kind, cum, cum_stat, cum_mat, word = spec.kernel_args()
    return backend.sample_cells(as_seed(spec.seed), int(trial_id), kind, int(lo), int(hi - lo + 1),
                                cum, cum_stat, cum_mat, word)


def sample_window(spec: SamplerSpec, lo: int, hi: int, trial_id: int) -> ConfigurationWindow:
    return ConfigurationWindow(lo, sample_cells(spec, lo, hi, trial_id), spec.alphabet_size)


# -- membership diagnostics --------------------------------------------------

# relative floor for the long-run variance, as a fraction of the one-cell variance
VARIANCE_FLOOR = 0.05
MEAN_SIGMAS = 4.0


@dataclass(frozen=True)
class MixDiagnostics:
    """Mean and asymptotic-variance estimates of a projected sample.

    ``asymptotic_variance_estimate`` is ``c0 + sum_{k<=lag} c_k`` (cross terms
    counted once); ``standard_variance_estimate`` counts them twice.
    ``long_run_variance`` is the Bartlett-weighted form of the latter, which
    stays consistent for bounded walks; the verdict is based on it.
    """

    mean_estimate: float
    asymptotic_variance_estimate: float
    standard_variance_estimate: float
    long_run_variance: float
    marginal_variance: float
    mean_stderr: float
    lag_used: int
    sample_length: int
    verdict: str


def signed_projection(states: np.ndarray) -> np.ndarray:
    return decode(states).astype(np.float64)


def autocovariances(x: np.ndarray, lag: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    x = x - x.mean()
    n = x.size
    return np.array([np.dot(x[: n - k], x[k:]) / n for k in range(lag + 1)])


def estimate_asymptotic_variance(spec: SamplerSpec, sample_length: int, lag: int,
                                 projection: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                                 trial_id: int = 0) -> MixDiagnostics:
    """Mixing diagnostics from one window of ``sample_length`` cells.

    ``projection`` maps the encoded state array to reals (it may shorten it,
    e.g. a word-based defect projection); by default gliders states are
    read as -1/0/+1.
    """
    if lag < 0:
        raise ValueError("lag must be nonnegative")
    if lag >= sample_length:
        raise ValueError(f"lag {lag} must be smaller than sample_length {sample_length}")
    states = sample_cells(spec, 0, sample_length - 1, trial_id)
    if projection is None:
        projection = signed_projection
    x = np.asarray(projection(states), dtype=np.float64)
    if x.size <= lag:
        raise ValueError("projected sample is shorter than the lag")
    c = autocovariances(x, lag)
    paper = c[0] + c[1:].sum()
    standard = c[0] + 2.0 * c[1:].sum()
    weights = 1.0 - np.arange(1, lag + 1) / (lag + 1.0)
    long_run = c[0] + 2.0 * np.dot(weights, c[1:])
    mean = float(x.mean())
    stderr = float(np.sqrt(max(long_run, 0.0) / x.size))
    if abs(mean) > MEAN_SIGMAS * stderr:
        verdict = "mean_nonzero"
    elif long_run <= VARIANCE_FLOOR * c[0] or c[0] == 0.0:
        verdict = "variance_zero"
    else:
        verdict = "plausible_member"
    return MixDiagnostics(mean, float(paper), float(standard), float(long_run), float(c[0]),
                          stderr, lag, int(x.size), verdict)
