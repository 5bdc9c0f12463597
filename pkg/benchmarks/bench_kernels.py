"""Time the compiled kernels against the NumPy fallback.

Run: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from pinpoint._kernel import pure

try:
    from pinpoint._kernel import _core
except ImportError:
    _core = None


def _instances(rng, k, n_resp, count):
    out = []
    for _ in range(count):
        prior = rng.dirichlet(np.ones(k))
        lik = np.ascontiguousarray(rng.uniform(0.0, 1.0, size=(k, n_resp)))
        out.append((prior, lik))
    return out


def _time(fn, instances, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for prior, lik in instances:
            fn(prior, lik)
        best = min(best, time.perf_counter() - start)
    return best


def _time_posterior(impl, instances, repeats):
    # pre-extract contiguous likelihood columns (the kernels require C order)
    columns = [(prior, np.ascontiguousarray(lik[:, 0])) for prior, lik in instances]
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for prior, lik in columns:
            impl.posterior(prior, lik, 1e-6, False)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    parser.add_argument("--count", type=int, default=2000, help="instances per case")
    args = parser.parse_args()

    if _core is None:
        print("compiled kernel not built; showing pure backend only")
    rng = np.random.default_rng(7)
    cases = [(10, 6), (10, 20), (100, 6), (100, 40)]
    header = f"{'case':>14} {'pure':>12} {'compiled':>12} {'speedup':>9}"
    print("eig_score (seconds per batch, best of %d):" % args.repeats)
    print(header)
    for k, n in cases:
        instances = _instances(rng, k, n, args.count)
        t_pure = _time(pure.eig_score, instances, args.repeats)
        if _core is not None:
            t_core = _time(_core.eig_score, instances, args.repeats)
            print(f"{f'k={k} r={n}':>14} {t_pure:>12.4f} {t_core:>12.4f} {t_pure / t_core:>8.1f}x")
        else:
            print(f"{f'k={k} r={n}':>14} {t_pure:>12.4f} {'-':>12} {'-':>9}")

    print("\nposterior (seconds per batch, best of %d):" % args.repeats)
    print(header)
    for k, n in [(10, 6), (100, 6)]:
        instances = _instances(rng, k, n, args.count)
        t_pure = _time_posterior(pure, instances, args.repeats)
        if _core is not None:
            t_core = _time_posterior(_core, instances, args.repeats)
            print(f"{f'k={k}':>14} {t_pure:>12.4f} {t_core:>12.4f} {t_pure / t_core:>8.1f}x")
        else:
            print(f"{f'k={k}':>14} {t_pure:>12.4f} {'-':>12} {'-':>9}")

    # sanity: both backends agree on a fresh instance
    prior, lik = _instances(rng, 50, 10, 1)[0]
    if _core is not None:
        assert abs(pure.eig_score(prior, lik) - _core.eig_score(prior, lik)) < 1e-12


if __name__ == "__main__":
    main()
