"""Compiled core against the numpy fallback.

    python benchmarks/bench_core.py [--n 200000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from dunklkit import _core_py

try:
    from dunklkit import _core
except ImportError:
    _core = None


def cases(n, rng):
    x = rng.uniform(-4, 4, n)
    t = rng.uniform(-4, 4, n)
    x0 = 10 ** rng.uniform(-2, 1, n)
    z = rng.uniform(0, 1, n)
    return {
        "hyp2f1_vec": lambda m: m.hyp2f1_vec(0.8, 1.8, 2.6, z, 1 - z),
        "riesz_kernel": lambda m: m.riesz_kernel(0.5, x, t),
        "poisson_kernel": lambda m: m.poisson_kernel(0.5, x0, x, t),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"n = {a.n}, best of {a.repeat}")
    print(f"{'kernel':16s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, call in cases(a.n, rng).items():
        tp = min(timeit.repeat(lambda: call(_core_py), number=1, repeat=a.repeat)) * 1e3
        if _core is None:
            print(f"{name:16s} {tp:10.1f} {'n/a':>10s}")
            continue
        tc = min(timeit.repeat(lambda: call(_core), number=1, repeat=a.repeat)) * 1e3
        p, c = call(_core_py), call(_core)
        rel = float(np.max(np.abs(p - c) / np.maximum(np.abs(p), 1e-300)))
        print(f"{name:16s} {tp:10.1f} {tc:10.1f} {tp / tc:7.1f}x {rel:13.1e}")


if __name__ == "__main__":
    main()
