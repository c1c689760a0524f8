"""Time the numba kernels against their numpy twins, plus one full metric sweep per backend.

Usage::

    python3 benchmarks/bench_kernels.py [--length 10000] [--repeat 20]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from tsadm.kernels import numba_impl, numpy_impl
from tsadm.labels import runs


def _inputs(T, seed=0):
    rng = np.random.default_rng(seed)
    y = np.zeros(T, dtype=np.int8)
    for s in rng.choice(T - 60, size=max(1, T // 500), replace=False):
        y[s:s + rng.integers(1, 60)] = 1
    yhat = (rng.random(T) < 0.1).astype(np.int8)
    score = rng.random(T)
    order = np.argsort(-score, kind="stable")
    gs, ge = runs(y)
    ps, pe = runs(yhat)
    yf = y.astype(np.float64)
    return {
        "interval_overlaps": (gs, ge, ps, pe),
        "soft_labels": (yf, 10),
        "weighted_curve_areas": (score[order], yf[order], 1.0 - yf[order]),
        "lsf_counts": (y, yhat, 10, False),
        "nab_raw": (gs, ge, np.flatnonzero(yhat), 1.0, 0.11),
        "rolling_median": (score, 100),
        "nearest_distance_sum": (np.flatnonzero(y), np.flatnonzero(yhat)),
    }


def bench_kernels(T, repeat):
    args = _inputs(T)
    print(f"kernel timings, T={T}, best of {repeat} (microseconds)")
    print(f"{'kernel':<24}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, a in args.items():
        f_np = getattr(numpy_impl, name)
        f_nb = getattr(numba_impl, name)
        f_nb(*a)  # compile
        t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=repeat)) * 1e6
        t_nb = min(timeit.repeat(lambda: f_nb(*a), number=1, repeat=repeat)) * 1e6
        print(f"{name:<24}{t_np:12.1f}{t_nb:12.1f}{t_np / t_nb:10.1f}x")


SWEEP = """
import time, numpy as np
from tsadm import synth, strategies
from tsadm.metrics import registry
d = synth.generate(synth.SynthConfig({T}, 0.1, 1))
runs = [strategies.uniform_random(d.labels, k) for k in range(8)]
registry.evaluate(d.labels, runs[0].predictions, runs[0].scores)
t = time.perf_counter()
for r in runs:
    registry.evaluate(d.labels, r.predictions, r.scores)
print((time.perf_counter() - t) / len(runs) * 1e3)
"""


def bench_sweep(T):
    print(f"\nall-metric evaluation of one run, T={T} (milliseconds)")
    for backend in ("numpy", "numba"):
        env = {**os.environ, "TSADM_BACKEND": backend}
        out = subprocess.run([sys.executable, "-c", SWEEP.format(T=T)], env=env,
                             capture_output=True, text=True, check=True).stdout
        print(f"{backend:<8}{float(out):10.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=10000)
    ap.add_argument("--repeat", type=int, default=20)
    a = ap.parse_args()
    bench_kernels(a.length, a.repeat)
    bench_sweep(a.length)


if __name__ == "__main__":
    main()
