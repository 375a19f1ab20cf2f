"""Compare the numba hot-kernel path against the pure-numpy fallback.

Times pairwise squared-distance assembly (the package's only hot inner
loop) and full rbf Gram construction at several problem sizes, checks
the two paths agree numerically, and prints a speedup table.

Run:  python benchmarks/bench_backends.py [--sizes 200,500,1000] [--dims 2,5,64]
"""

import argparse
import time

import numpy as np

from kernellp.backend import NUMBA_ENABLED, sq_dists_numpy
from kernellp.kernels import KernelSpec, gram


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000")
    parser.add_argument("--dims", default="2,5,64")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    dims = [int(d) for d in args.dims.split(",")]

    if not NUMBA_ENABLED:
        print("numba backend unavailable or disabled (KERNELLP_NUMBA=0): nothing to compare")
        return

    from kernellp._numba_kernels import sq_dists_numba

    rng = np.random.default_rng(0)
    # warm the JIT outside the timed region
    warm = rng.standard_normal((8, 3))
    sq_dists_numba(warm, warm)

    print(f"{'n':>6} {'dim':>5} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}   gram rbf (ms) numpy/numba")
    for n in sizes:
        for d in dims:
            a = np.ascontiguousarray(rng.standard_normal((n, d)))
            t_np = best_of(lambda: sq_dists_numpy(a, a), args.repeats)
            t_nb = best_of(lambda: sq_dists_numba(a, a), args.repeats)
            if not np.allclose(sq_dists_numba(a, a), sq_dists_numpy(a, a), rtol=1e-10, atol=1e-10):
                raise AssertionError(f"backend mismatch at n={n}, d={d}")

            X = a.T
            spec = KernelSpec("rbf", width=1.0)
            import kernellp.backend as backend

            saved = backend.pairwise_sq_dists
            try:
                backend.pairwise_sq_dists = sq_dists_numpy
                import kernellp.kernels as kernels

                kernels.pairwise_sq_dists = sq_dists_numpy
                g_np = best_of(lambda: gram(spec, X), args.repeats)
                kernels.pairwise_sq_dists = lambda p, q: sq_dists_numba(
                    np.ascontiguousarray(p), np.ascontiguousarray(q)
                )
                g_nb = best_of(lambda: gram(spec, X), args.repeats)
            finally:
                backend.pairwise_sq_dists = saved
                kernels.pairwise_sq_dists = saved
            print(
                f"{n:>6} {d:>5} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} {t_np / t_nb:>8.2f}x"
                f"   {g_np * 1e3:.2f} / {g_nb * 1e3:.2f}"
            )


if __name__ == "__main__":
    main()
