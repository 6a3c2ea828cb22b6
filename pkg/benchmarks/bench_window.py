"""Compare the numba and numpy window-engine backends.

Run: python benchmarks/bench_window.py [--n 1000000] [--L 101] [--repeats 3]

Times ``window_stats_all`` and a full ``adapt_sequence`` on one Laplace
sequence with each backend, after a warm-up call, and checks that both
backends produce identical output.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from evtcfar import _backend
from evtcfar.adapt import AdaptConfig, adapt_sequence
from evtcfar.sequence import LabeledSequence
from evtcfar.synth import SynthConfig, generate
from evtcfar.tail import GammaParams
from evtcfar.window import WindowConfig, window_stats_all


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--L", type=int, default=101)
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args(argv)

    seq = generate(SynthConfig(n=args.n, seed=0))
    wcfg = WindowConfig(args.L, 0.05)
    acfg = AdaptConfig(L=args.L)
    prior = GammaParams(401.0, 400.0)
    backends = ["numpy"] + (["numba"] if _backend.HAS_NUMBA else [])
    if not _backend.HAS_NUMBA:
        print("numba not available (or EVTCFAR_BACKEND=numpy); timing numpy only")

    results = {}
    print(f"n={args.n} L={args.L} best of {args.repeats}")
    print(f"{'backend':8s} {'window (s)':>11s} {'adapt (s)':>10s} {'Msamples/s':>11s}")
    for b in backends:
        small = LabeledSequence("w", seq.scores[:5000])
        window_stats_all(small.scores, wcfg, backend=b)
        adapt_sequence(small, prior, acfg, backend=b)
        tw, stats = best_of(lambda: window_stats_all(seq.scores, wcfg, backend=b), args.repeats)
        ta, res = best_of(lambda: adapt_sequence(seq, prior, acfg, backend=b), args.repeats)
        results[b] = (stats, res)
        print(f"{b:8s} {tw:11.3f} {ta:10.3f} {args.n / ta / 1e6:11.2f}")

    if len(results) == 2:
        (s1, r1), (s2, r2) = results.values()
        same = (np.array_equal(s1.u, s2.u) and np.array_equal(s1.s, s2.s)
                and np.array_equal(r1.adapted_scores, r2.adapted_scores))
        print("outputs identical:", same)


if __name__ == "__main__":
    main()
