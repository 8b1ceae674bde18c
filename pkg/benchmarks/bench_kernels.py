"""Time the combination-scoring kernels against each other.

    python benchmarks/bench_kernels.py [--slots 4] [--options 6] [--speakers 16] [--repeat 5]

Each backend scores the full product of ``options`` candidates over ``slots``
utterance slots. The numba kernel is compiled before timing starts.
"""
import argparse
import time

import numpy as np

from spkrerank import _kernels


def make_inputs(slots, options, speakers, seed=0):
    rng = np.random.default_rng(seed)
    cand = np.stack([np.sort(rng.choice(speakers, size=options, replace=False)) for _ in range(slots)])
    val = rng.random((slots, options))
    sizes = np.full(slots, options, dtype=np.int64)
    w = np.triu(rng.integers(0, 5, size=(speakers, speakers)), 1)
    w = w + w.T
    total = w.sum() // 2
    return cand.astype(np.int64), val, sizes, w.sum(1) / total, w / total


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--slots", type=int, default=4)
    p.add_argument("--options", type=int, default=6)
    p.add_argument("--speakers", type=int, default=16)
    p.add_argument("--repeat", type=int, default=5)
    a = p.parse_args()

    inputs = make_inputs(a.slots, a.options, a.speakers)
    args = (*inputs, 1.0, True)
    n = _kernels.n_combinations(inputs[2])
    backends = {"numpy": _kernels.score_all_numpy}
    if _kernels.HAS_NUMBA:
        _kernels.score_all_numba(*args)
        backends["numba"] = _kernels.score_all_numba
    if n <= 50_000:
        backends["python"] = _kernels.score_all_python

    print(f"{n} combinations, {a.slots} slots x {a.options} options, {a.speakers} speakers")
    ref = None
    for name, fn in backends.items():
        t, out = bench(fn, args, a.repeat)
        same = "" if ref is None else ("  identical" if np.array_equal(ref, out) else "  MISMATCH")
        ref = out if ref is None else ref
        print(f"{name:>7}: {1e3 * t:9.3f} ms  {n / t / 1e6:8.2f} M combos/s{same}")


if __name__ == "__main__":
    main()
