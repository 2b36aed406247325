"""Timing comparison of the line-search kernel backends.

Measures filtered_spectral_norms (compiled) against the pure-numpy
fallback across problem sizes and grid densities, and verifies that both
return the same values.  Run with:  python3 benchmarks/bench_gridsearch.py
"""

import argparse
import time

import numpy as np

from wavefactor import kernels, spectral


def _time(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    cases = [(n, m, g) for n in (11, 64, 200) for m in (8, 64) for g in (500, 4000)]
    print(f"compiled backend: {kernels.BACKEND}")
    print(f"{'n':>4} {'m':>4} {'grid':>6} {'compiled':>12} {'numpy':>12} {'speedup':>8}")
    for n, m, n_grid in cases:
        basis = spectral.eigendecompose(spectral.build_laplacian(n))
        Z = rng.standard_normal((n, m))
        w = basis.gamma.T @ Z
        gram = w @ w.T
        k_grid = np.linspace(0.0, 4.0, n_grid)
        gamma = 1226.0

        out_c = kernels.filtered_spectral_norms(gram, basis.lam, k_grid, gamma)
        out_py = kernels.filtered_spectral_norms_py(gram, basis.lam, k_grid, gamma)
        err = np.abs(out_c - out_py).max()
        if err > 1e-9:
            print(f"backend disagreement: max abs err {err:.3e}")
            return 1

        t_c = _time(
            kernels.filtered_spectral_norms, gram, basis.lam, k_grid, gamma,
            repeats=args.repeats,
        )
        t_py = _time(
            kernels.filtered_spectral_norms_py, gram, basis.lam, k_grid, gamma,
            repeats=args.repeats,
        )
        print(
            f"{n:>4} {m:>4} {n_grid:>6} {t_c * 1e3:>10.2f}ms {t_py * 1e3:>10.2f}ms "
            f"{t_py / t_c:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
