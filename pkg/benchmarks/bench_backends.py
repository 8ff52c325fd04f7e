#!/usr/bin/env python3
"""Benchmark the compiled step kernels against the numpy fallback.

Runs the same evolutions through both kernel modules and reports per-run
wall times and the speedup.  Invoke from the repo root:

    python benchmarks/bench_backends.py [--steps 200 500 1000] [--repeat 5]

Both kernels keep strict IEEE semantics (outputs are bit-identical).  Note
that very long runs (t >~ 1000 for split-step schedules) push the wave
packet's wing amplitudes into the subnormal float range, where per-element
cost rises sharply for either backend; sweep-style workloads (many runs at
t <= 500) sit in the fast regime, which is what the speedup column is
about.
"""

import argparse
import math
import time

import numpy as np

from pqwalk import _kernels_py

try:
    from pqwalk import _ckernels
except ImportError:
    _ckernels = None


def run_case(kernels, t, split):
    n = 2 * (t + 1) + 1
    down = np.zeros(n, dtype=np.complex128)
    up = np.zeros(n, dtype=np.complex128)
    down[n // 2] = up[n // 2] = 1.0 / math.sqrt(2.0)
    if split:
        code = kernels.run_split_steps(down, up, math.cos(math.pi / 4),
                                       math.sin(math.pi / 4),
                                       math.cos(math.pi / 3),
                                       math.sin(math.pi / 3), t)
    else:
        table = np.where(np.arange(1, t + 1) % 2 == 0, math.pi / 3, math.pi / 4)
        code = kernels.run_full_steps(down, up, np.cos(table), np.sin(table), t)
    assert code == 0
    return down, up


def best_time(kernels, t, split, repeat):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        run_case(kernels, t, split)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, nargs="+",
                        default=[100, 200, 500, 1000])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels not built; nothing to compare "
              "(pip install -e . with a C compiler)")
        return

    print(f"{'case':>22} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for split in (False, True):
        label = "split_step" if split else "two_period"
        for t in args.steps:
            t_py = best_time(_kernels_py, t, split, args.repeat)
            t_c = best_time(_ckernels, t, split, args.repeat)
            d1, u1 = run_case(_kernels_py, t, split)
            d2, u2 = run_case(_ckernels, t, split)
            err = max(np.max(np.abs(d1 - d2)), np.max(np.abs(u1 - u2)))
            print(f"{label + f' t={t}':>22} {t_py * 1e3:>10.2f}ms "
                  f"{t_c * 1e3:>10.2f}ms {t_py / t_c:>8.1f}x   "
                  f"(max amp diff {err:.1e})")


if __name__ == "__main__":
    main()
