"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case runs once per backend to warm up (numba compiles on first call),
then reports the best of ``--repeat`` timings and the largest relative
difference between the two backends' outputs.
"""
import argparse
import time

import numpy as np

from hoselberg import _kernels
from hoselberg.quadrature import graded_rule
from hoselberg.roots import RootSystem, rho


def hc_case(n, H):
    lam = np.linspace(1.3, -1.3, n + 1).astype(complex)
    k = 0.37 - 0.2j
    p = lam + rho(RootSystem(n), k)
    return lambda: _kernels.hc_stream(lam, p, k, n, H)[0]


def log_product_case(points):
    rng = np.random.Generator(np.random.PCG64(0))
    X = rng.uniform(0, 3, size=(points, 8))
    fa = np.array([0, 1, 2, 3, 4, 5, 0, 2, 4])
    fb = np.array([6, 6, 7, 7, 6, 7, 1, 3, 5])
    exps = rng.normal(size=fa.size) * 0.3
    return lambda: _kernels.log_product(X, fa, fb, exps)


def tensor_case(level):
    # nested 3-variable domain 0 < a < b < 1, a < c < b with anchors 0 and 1
    rules = [graded_rule(-0.2, 0.6, level, 10 + 2 * level), graded_rule(0.1, 0.6, level, 10 + 2 * level),
             graded_rule(-0.3, -0.3, level, 10 + 2 * level)]
    total = int(np.prod([len(r[0]) for r in rules]))
    args = (rules, [3, 0, 0], [4, 4, 1], [0.0, 1.0], np.array([0, 1, 2, 2, 0]), np.array([3, 3, 0, 1, 1]),
            np.array([-0.2, -0.2, -0.3, -0.3, 0.4]))
    return lambda: _kernels.tensor_chunk(0, total, *args), total


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    tensor_fn, tensor_points = tensor_case(4)
    cases = [
        ("hc_stream n=1 H=4096", hc_case(1, 4096)),
        ("hc_stream n=2 H=256", hc_case(2, 256)),
        ("hc_stream n=3 H=48", hc_case(3, 48)),
        ("log_product 200k points", log_product_case(200_000)),
        (f"tensor_chunk {tensor_points} points", tensor_fn),
    ]
    print(f"{'case':32s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    saved = _kernels.backend()
    try:
        for name, fn in cases:
            timing, out = {}, {}
            for backend in ("numba", "numpy"):
                _kernels.set_backend(backend)
                out[backend] = np.asarray(fn())
                timing[backend] = best_time(fn, args.repeat)
            diff = np.max(np.abs(out["numba"] - out["numpy"]) / np.maximum(np.abs(out["numpy"]), 1e-300))
            print(f"{name:32s} {timing['numba']:10.4f} {timing['numpy']:10.4f} "
                  f"{timing['numpy'] / timing['numba']:8.1f} {diff:13.2e}")
    finally:
        _kernels.set_backend(saved)


if __name__ == "__main__":
    main()
