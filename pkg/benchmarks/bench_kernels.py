"""Wall-clock comparison of the numba and numpy kernel backends.

Run ``python benchmarks/bench_kernels.py [--repeat R] [--quick]``.  Each
kernel is called once to warm the JIT cache, then timed ``R`` times; the
best time is reported together with the agreement between backends.
"""

import argparse
import time

import numpy as np

from ia_tails import kernels


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile or cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(quick):
    scale = 10 if quick else 1
    rng = np.random.default_rng(0)
    n = 200_000 // scale
    x = rng.uniform(0.0, 1.0, n)
    a = rng.uniform(0.5, 50.0, n)
    b = rng.uniform(0.5, 5.0, n)
    yield ("betainc", f"n={n}",
           lambda: kernels.betainc_numba(x, a, b),
           lambda: kernels.betainc_numpy(x, a, b),
           lambda u, v: float(np.max(np.abs(u - v))))

    steps = 200_000 // scale
    yield ("cnm", f"steps={steps}, agents=1e5",
           lambda: kernels.cnm_groups_numba(np.random.default_rng(1), 100_000, 0.05, 8000, steps),
           lambda: kernels.cnm_groups_numpy(np.random.default_rng(1), 100_000, 0.05, 8000, steps),
           lambda u, v: abs(float(u.mean()) - float(v.mean())) / max(float(v.mean()), 1e-300))

    orbits, length = 2000 // scale, 2000
    x0, y0 = rng.uniform(0.0, 2 * np.pi, (2, orbits))
    yield ("stdmap", f"orbits={orbits}, iterations={2 * length}",
           lambda: kernels.stdmap_sums_numba(x0, y0, 0.6, length, length)[0],
           lambda: kernels.stdmap_sums_numpy(x0, y0, 0.6, length, length)[0],
           lambda u, v: float(np.median(np.abs(u - v))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="10x smaller problems")
    args = ap.parse_args()
    print(f"{'kernel':<8} {'size':<28} {'numba s':>9} {'numpy s':>9} {'speedup':>8}  agreement")
    for name, size, fast, slow, diff in cases(args.quick):
        t_fast, u = best_of(fast, args.repeat)
        t_slow, v = best_of(slow, args.repeat)
        print(f"{name:<8} {size:<28} {t_fast:9.4f} {t_slow:9.4f} {t_slow / t_fast:8.1f}  {diff(u, v):.2e}")


if __name__ == "__main__":
    main()
