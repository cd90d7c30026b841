"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once untimed (numba compilation, numpy warm-up), then the
best of ``--repeat`` timings is reported. Outputs are checked for equality.
"""
import argparse
import time

import numpy as np

from gliders.ca import GlidersRule
from gliders.entrytime import Projection, experiment_window
from gliders.kernels import as_seed, numba_backend, numpy_backend
from gliders.measures import SamplerSpec


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    spec = SamplerSpec.gliders_bernoulli(0.5, 0, 0.5, seed=1)
    kind, cum, cs, cm, word = spec.kernel_args()
    markov = SamplerSpec.markov([[0.9, 0.05, 0.05], [0.3, 0.4, 0.3], [0.05, 0.05, 0.9]], seed=1)
    mk = markov.kernel_args()
    ident = Projection.identity()
    seed = as_seed(1)

    def sampling(be, args=(kind, cum, cs, cm, word)):
        return lambda: be.sample_cells(seed, 3, args[0], -500_000, 1_000_000, *args[1:])

    def entry(be, rule, n, trials):
        lo, count = experiment_window(rule, n, 4 * n, "minus")
        ids = np.arange(trials, dtype=np.int64)
        return lambda: be.entry_times(seed, ids, kind, cum, cs, cm, word, ident.table, 1, 3,
                                      lo, count, False, rule.v_minus, rule.v_plus, n, 4 * n)

    def minima(be, kind_code, thr):
        ids = np.arange(2000, dtype=np.int64)
        return lambda: be.walk_minima(seed, ids, 10_000, 2, kind_code, thr)

    return [
        ("sample 1e6 Bernoulli cells", lambda be: sampling(be)),
        ("sample 1e6 Markov cells", lambda be: sampling(be, mk)),
        ("entry times (-1,0) n=2000 x2000", lambda be: entry(be, GlidersRule(-1, 0), 2000, 2000)),
        ("entry times (-3,1) n=2000 x500", lambda be: entry(be, GlidersRule(-3, 1), 2000, 500)),
        ("walk minima fair 1e4 steps x2000", lambda be: minima(be, 0, 0)),
        ("walk minima 3-point 1e4 steps x2000", lambda be: minima(be, 1, 16384)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if numba_backend is None:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'kernel':<40}{'numba s':>10}{'numpy s':>10}{'speedup':>10}  equal")
    for name, make in cases():
        t_nb, out_nb = best_of(make(numba_backend), args.repeat)
        t_np, out_np = best_of(make(numpy_backend), args.repeat)
        same = np.array_equal(out_nb, out_np)
        print(f"{name:<40}{t_nb:>10.3f}{t_np:>10.3f}{t_np / t_nb:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
