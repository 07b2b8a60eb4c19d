"""Timing comparison of the compiled kernels against their interpreted twins.

Runs each hot kernel (butterfly transform, successive-cancellation decode,
channel-pair merging) in both forms on realistic sizes and prints the
speedup.  The compiled path is required, so run this without
POLARLATTICE_NO_NUMBA in the environment.

Usage: python benchmarks/bench_kernels.py [--repeats R]
"""

import argparse
import time

import numpy as np

from polarlattice import _kernels


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _bench(name, py_fn, jit_fn, repeats):
    t_py = _best_of(py_fn, repeats)
    t_jit = _best_of(jit_fn, repeats)
    print(f"{name:<28} interpreted {t_py * 1e3:9.3f} ms   "
          f"compiled {t_jit * 1e3:9.3f} ms   speedup {t_py / t_jit:7.1f}x")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not _kernels.NUMBA_ACTIVE:
        print("compiled path is disabled (POLARLATTICE_NO_NUMBA is set); "
              "nothing to compare")
        return 1

    print("compiling kernels...")
    _kernels.warmup()
    rng = np.random.default_rng(0)

    n = 4096
    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    _bench(
        f"polar_transform (n={n})",
        lambda: _kernels.polar_transform_py(bits.copy()),
        lambda: _kernels.polar_transform_jit(bits.copy()),
        args.repeats,
    )

    n = 1024
    llrs = rng.standard_normal(n) * 4.0
    frozen = (rng.random(n) < 0.5).astype(np.uint8)
    _bench(
        f"sc_decode (n={n})",
        lambda: _kernels.sc_decode_py(llrs, frozen, 40.0),
        lambda: _kernels.sc_decode_jit(llrs, frozen, 40.0),
        args.repeats,
    )

    pairs = 8192
    raw = np.sort(rng.random(2 * pairs)).reshape(-1, 2)
    a = raw[:, 1].copy()
    b = raw[:, 0].copy()
    order = np.argsort(-(a / (a + b)), kind="stable")
    a, b = a[order], b[order]
    scale = a.sum() + b.sum()
    a /= scale
    b /= scale
    _bench(
        f"merge_pairs ({pairs} -> 128)",
        lambda: _kernels.merge_pairs_py(a, b, 128),
        lambda: _kernels.merge_pairs_jit(a, b, 128),
        args.repeats,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
