"""Compare the compiled and pure-Python elimination kernels.

Usage: python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import timeit

from kronspan import _pykernels
from kronspan.fields import DEFAULT_PRIME
from kronspan.secant import build_n_matrix

try:
    from kronspan import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_rows(n: int, p: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    # rank n - n//10 so elimination also meets dependent rows
    basis = [[rng.randrange(p) for _ in range(n)] for _ in range(n - n // 10)]
    extra = [[sum(rng.randrange(5) * b[j] for b in basis[:3]) % p for j in range(n)] for _ in range(n // 10)]
    return basis + extra


def best_time(fn, rows, p, repeat):
    return min(timeit.repeat(lambda: fn([r[:] for r in rows], p), number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    p = DEFAULT_PRIME
    cases = [(f"dense {n}x{n} mod p", random_rows(n, p, n)) for n in args.sizes]
    n = build_n_matrix(2, 2, 2)
    cases.append(("N_{2,2,2} columns", n.column_vectors()))
    print(f"{'case':<24}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for name, rows in cases:
        py = best_time(_pykernels.rank_mod_p, rows, p, args.repeat)
        if _ckernels is None:
            print(f"{name:<24}{py:>12.4f}{'n/a':>12}{'':>10}")
            continue
        assert _ckernels.rank_mod_p([r[:] for r in rows], p) == _pykernels.rank_mod_p([r[:] for r in rows], p)
        cy = best_time(_ckernels.rank_mod_p, rows, p, args.repeat)
        print(f"{name:<24}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
