"""Benchmark the compiled energy kernels against the NumPy reference.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the pair-sum kernels on perturbed n-gons across a ladder of vertex
counts and verifies that both backends agree to 1e-13 relative before
reporting speedups.
"""

import argparse
import timeit

import numpy as np

import knotenergy._reference as reference

try:
    import knotenergy._speedups as speedups
except ImportError:
    speedups = None


def perturbed_ngon_vertices(m: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    t = 2.0 * np.pi * np.arange(m) / m
    v = np.stack([np.cos(t), np.sin(t), np.zeros(m)], axis=1)
    return v + 0.05 * rng.standard_normal((m, 3))


def time_call(fn, v, repeats: int) -> float:
    fn(v)  # warm up caches
    return min(timeit.repeat(lambda: fn(v), number=1, repeat=repeats))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if speedups is None:
        print("compiled kernels not built; showing the reference backend only")

    kernels = ["ecos_sum", "kim_kusner_sum", "simon_md_sum"]
    print(f"{'kernel':<16}{'m':>6}{'python':>12}{'cython':>12}{'speedup':>9}")
    for name in kernels:
        for m in (32, 64, 128, 256, 512):
            v = perturbed_ngon_vertices(m)
            ref_fn = getattr(reference, name)
            t_py = time_call(ref_fn, v, args.repeats)
            if speedups is None:
                print(f"{name:<16}{m:>6}{t_py * 1e3:>10.2f}ms{'-':>12}{'-':>9}")
                continue
            cy_fn = getattr(speedups, name)
            a, b = ref_fn(v)[0], cy_fn(v)[0]
            assert abs(a - b) <= 1e-13 * max(abs(a), 1.0), f"{name} m={m} disagrees"
            t_cy = time_call(cy_fn, v, args.repeats)
            print(f"{name:<16}{m:>6}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms"
                  f"{t_py / t_cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
