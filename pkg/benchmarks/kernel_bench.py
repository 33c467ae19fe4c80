"""Benchmark the numba kernels against the numpy fallback path.

Usage: python benchmarks/kernel_bench.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from sitewise import _kernels


def timed(fn, repeat):
    fn()  # warm any JIT compilation before timing
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_edt(table, rng):
    mask = (rng.random((400, 400)) < 0.002).astype(np.uint8)
    mask[13, 200] = 1
    return lambda: table["edt_sq"](mask)


def bench_jenks(table, rng):
    vals = np.sort(rng.normal(size=3000))
    return lambda: table["jenks_dp"](vals, 4)


def bench_radius(table, rng):
    ids = rng.integers(0, 8, size=(300, 300)).astype(np.int32)
    return lambda: table["radius_counts"](ids, 150.0, 150.0, 120.0,
                                          0.0, 0.0, 1.0, 8)


def bench_tree(table, rng):
    n, k = 4000, 7
    X = rng.normal(size=(n, k))
    y = ((X @ rng.normal(size=k)) > 0).astype(np.int64) \
        + 2 * ((X @ rng.normal(size=k)) > 0.5).astype(np.int64)
    rows = rng.integers(0, n, n)
    feat_order = rng.permuted(
        np.tile(np.arange(k, dtype=np.int32), (2 * n + 1, 1)), axis=1)
    mx = 2 * n + 1

    def run():
        table["grow_gini"](X, y, rows.copy(), 4, -1, 1, 3, feat_order,
                           np.empty(mx, np.int64), np.empty(mx),
                           np.empty(mx, np.int64), np.empty(mx, np.int64),
                           np.empty((mx, 4)), np.zeros(k))

    return run


def bench_newton(table, rng):
    n, k = 4000, 7
    X = rng.normal(size=(n, k))
    g = rng.normal(size=n)
    h = rng.uniform(0.05, 0.25, n)
    mx = 2 * n + 1

    def run():
        table["grow_newton"](X, g, h, 1.0, 6, 1, 1e-12,
                             np.empty(mx, np.int64), np.empty(mx),
                             np.empty(mx, np.int64), np.empty(mx, np.int64),
                             np.empty(mx), np.zeros(k))

    return run


def bench_svc(table, rng):
    n = 900
    X = rng.normal(size=(n, 7))
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    K = np.exp(-0.15 * d2) + 1.0
    y = np.where(X[:, 0] > 0, 1.0, -1.0)
    return lambda: table["svc_dual"](K, y, 1.0, 40, 1e-8)


BENCHES = {
    "edt_400x400": bench_edt,
    "jenks_n3000_k4": bench_jenks,
    "radius_counts_300x300": bench_radius,
    "cart_gini_n4000_k7": bench_tree,
    "newton_tree_n4000_k7": bench_newton,
    "svc_dual_n900": bench_svc,
}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"numpy": _kernels.get_backend("numpy")}
    try:
        backends["numba"] = _kernels.get_backend("numba")
    except Exception as exc:  # noqa: BLE001
        print(f"numba backend unavailable ({exc}); timing numpy only")

    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in backends)
          + f"{'speedup':>10}")
    for name, make in BENCHES.items():
        times = {}
        for backend, table in backends.items():
            rng = np.random.default_rng(0)
            times[backend] = timed(make(table, rng), args.repeat)
        row = f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.2f}ms"
                                      for b in backends)
        if len(times) == 2:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
