"""Time each hot kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--scale 1.0] [--repeat 5]

The first numba call per kernel includes JIT compilation and is reported
separately; the table shows the best of ``--repeat`` warm runs.
"""

import argparse
import time

import numpy as np

from wdsubgraph import _kernels


def random_dag_csr(rng, n, m):
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst[order].astype(np.int64)


def cases(scale, rng):
    n = int(2_000_000 * scale)
    indptr, indices = random_dag_csr(rng, n // 4, n // 2)
    values = rng.integers(0, 10 * n, n)
    sorted_set = np.unique(rng.integers(0, 10 * n, n // 10))
    heads = rng.integers(0, n // 4, n)
    tails = rng.integers(0, n // 4, n)
    return {
        "reachable": lambda b: _kernels.reachable(indptr, indices, 0, b),
        "member_mask": lambda b: _kernels.member_mask(values, sorted_set, b),
        "incidence_degree": lambda b: _kernels.incidence_degree(heads, tails, n // 4, b),
        "splitmix64": lambda b: _kernels.splitmix64(12345, n, b),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + f"{'jit (s)':>12}{'speedup':>10}")
    for name, fn in cases(args.scale, rng).items():
        jit = ""
        if "numba" in backends:
            t0 = time.perf_counter()
            fn("numba")
            jit = f"{time.perf_counter() - t0:.3f}"
        results = {b: fn(b) for b in backends}
        if len(results) == 2:
            assert np.array_equal(results["numpy"], results["numba"]), name
        t = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        speed = f"{t['numpy'] / t['numba']:.1f}x" if "numba" in t else "-"
        print(f"{name:<18}" + "".join(f"{t[b]:>12.4f}" for b in backends) + f"{jit:>12}{speed:>10}")


if __name__ == "__main__":
    main()
