"""Timing comparison of the arcsine-statistics backends.

Runs the compiled kernel (when available) and the NumPy fallback on the same
Hermitian covariances and reports median wall time per call plus the largest
disagreement between the two, at matrix sizes spanning typical relay array
dimensions.  Invoke with python3 benchmarks/bench_kernels.py.
"""
import time

import numpy as np

from onebit_relay import _kernels_np
from onebit_relay.numerics import complex_gaussian, make_rng

try:
    from onebit_relay import _kernels
except ImportError:
    _kernels = None


def make_cov(rng, n: int) -> np.ndarray:
    A = complex_gaussian(rng, (n, 2 * n))
    R = A @ A.conj().T / (2 * n)
    return R + np.eye(n)


def median_time(fn, cov, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(cov)
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def main():
    rng = make_rng(0)
    sizes = (16, 64, 128, 256, 512)
    print(f"{'n':>5} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>9} {'max diff':>10}")
    for n in sizes:
        cov = make_cov(rng, n)
        repeats = max(3, 2048 // n)
        _kernels_np.arcsine_stats(cov)  # warm up caches and allocators
        t_np = median_time(_kernels_np.arcsine_stats, cov, repeats)
        if _kernels is None:
            print(f"{n:>5} {t_np * 1e3:>12.3f} {'missing':>14} {'':>9} {'':>10}")
            continue
        _kernels.arcsine_stats(cov)
        t_c = median_time(_kernels.arcsine_stats, cov, repeats)
        ref = _kernels_np.arcsine_stats(cov)
        out = _kernels.arcsine_stats(cov)
        diff = max(
            float(np.abs(a - b).max()) for a, b in zip(ref, out)
        )
        print(f"{n:>5} {t_np * 1e3:>12.3f} {t_c * 1e3:>14.3f} {t_np / t_c:>8.2f}x {diff:>10.2e}")


if __name__ == "__main__":
    main()
