"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Runs every kernel of the shared backend surface (radial evaluation, running
trapezoid, oscillatory and damped convolutions) on realistically shaped
inputs, prints per-kernel medians and the speedup, and cross-checks that the
two backends agree on the benchmark data (a smoke bound of 1e-10 of the
output scale; the tighter 1e-12 parity pins live in the test suite).

Usage:
    python benchmarks/bench_kernels.py [--points 20001] [--repeats 7]
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from icesim import _kernels_numpy

try:
    from icesim import _kernels_numba
except ImportError:  # numba not installed: nothing to compare against
    _kernels_numba = None


def _workloads(points: int):
    """(name, args) pairs shaped like the simulator's hot paths."""
    rng = np.random.default_rng(0)
    t = np.linspace(0.0, 2e-3, points)
    dt = float(t[1] - t[0])
    x = rng.uniform(0.0, 60.0, 100_000)
    modes = np.linspace(0.0, 1.2e6, 33)
    forcing = (rng.standard_normal((33, points))
               + 1j * rng.standard_normal((33, points)))
    wr2s = rng.uniform(-1e7, 4e8, 25)
    return [
        ("bessel_j_array", (0.5, x)),
        ("cumtrapz_batch", (forcing, dt)),
        ("sin_conv_batch", (modes, forcing, t, dt)),
        ("damped_conv_batch", (2611.0, wr2s, forcing[:25], t, dt)),
    ]


def _time(func, args, repeats: int) -> float:
    """Median seconds per call (the first call warms any compilation)."""
    func(*args)
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser(
        description="compare the numba and numpy kernel backends")
    parser.add_argument("--points", type=int, default=20_001,
                        help="time samples per convolution row")
    parser.add_argument("--repeats", type=int, default=7,
                        help="timed calls per kernel (median reported)")
    args = parser.parse_args()

    if _kernels_numba is None:
        print("numba backend unavailable; timing the numpy fallback only")
    header = f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, work in _workloads(args.points):
        base = _time(getattr(_kernels_numpy, name), work, args.repeats)
        if _kernels_numba is None:
            print(f"{name:<20}{base * 1e3:>12.3f}{'-':>12}{'-':>10}")
            continue
        jit = _time(getattr(_kernels_numba, name), work, args.repeats)
        got = getattr(_kernels_numba, name)(*work)
        want = getattr(_kernels_numpy, name)(*work)
        worst = float(np.max(np.abs(np.asarray(got) - np.asarray(want))))
        scale = float(np.max(np.abs(np.asarray(want)))) or 1.0
        if worst > 1e-10 * scale:
            raise SystemExit(f"{name}: backends disagree ({worst:.3e})")
        print(f"{name:<20}{base * 1e3:>12.3f}{jit * 1e3:>12.3f}"
              f"{base / jit:>10.2f}")


if __name__ == "__main__":
    main()
