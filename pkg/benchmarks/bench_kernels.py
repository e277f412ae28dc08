"""Compiled vs pure-Python population kernel.

    python benchmarks/bench_kernels.py --N 10 100 --iterations 500
"""
import argparse
import time

import numpy as np

from dypp.engine import GameConfig, init_population
from dypp.kernels import BACKENDS
from dypp.learners import SCHEMES


def per_round(backend, n, iterations, scheme, repeats):
    cfg = GameConfig(N=n, iterations=iterations, early_stop=False, do_scheme=scheme, curator_scheme=scheme)
    best = float("inf")
    trace = None
    for _ in range(repeats):
        state = init_population(cfg, backend)
        start = time.perf_counter()
        trace = state.advance(iterations)
        best = min(best, time.perf_counter() - start)
    return best / iterations, trace


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, nargs="+", default=[10, 100])
    ap.add_argument("--iterations", type=int, default=500)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--scheme", choices=SCHEMES, default="wolf-phc")
    args = ap.parse_args(argv)

    backends = sorted(BACKENDS)
    print(f"{'N':>5} " + " ".join(f"{b + ' us/round':>20}" for b in backends) + f" {'speedup':>9} identical")
    for n in args.N:
        times, traces = {}, {}
        for b in backends:
            times[b], traces[b] = per_round(b, n, args.iterations, args.scheme, args.repeats)
        row = f"{n:>5} " + " ".join(f"{times[b] * 1e6:>20.1f}" for b in backends)
        if "compiled" in times:
            same = all(np.array_equal(x, y) for x, y in zip(traces["compiled"], traces["python"]))
            row += f" {times['python'] / times['compiled']:>8.0f}x {same}"
        print(row)


if __name__ == "__main__":
    main()
