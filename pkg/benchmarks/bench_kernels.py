"""Benchmark the compiled battle kernels against the pure-Python fallback.

Run as a script:  python benchmarks/bench_kernels.py [--calls 200000]

Both backends are imported directly (the package-level selection is
bypassed) so the comparison is always available regardless of which backend
the package picked at import time.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from doublesim._kernels import pure

try:
    from doublesim._kernels import _core as compiled
except ImportError:
    compiled = None


def _workload(rng: np.random.Generator, n: int) -> list[tuple]:
    cases = []
    for _ in range(n):
        cases.append((
            int(rng.integers(20, 256)),                # power
            int(rng.integers(50, 400)),                # attack
            int(rng.integers(50, 400)),                # defense
            50,                                        # level
            float(rng.choice([1.0, 1.5, 2.0])),        # stab
            float(rng.choice([0.25, 0.5, 1.0, 2.0])),  # effectiveness
            bool(rng.integers(2)),                     # crit
            int(rng.integers(16)),                     # roll index
            bool(rng.integers(2)),                     # spread
            float(rng.choice([1.0, 1.5, 0.5])),        # weather
            float(rng.choice([1.0, 0.5])),             # screen
            float(rng.choice([1.0, 1.2])),             # item
            float(rng.choice([1.0, 1.3])),             # ability
            bool(rng.integers(2)),                     # burned
        ))
    return cases


def bench(backend, cases: list[tuple], repeats: int = 3) -> float:
    damage = backend.damage_amount
    stat = backend.compute_stat
    boost = backend.boost_multiplier
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        acc = 0
        for case in cases:
            acc += damage(*case)
            acc += stat(80, 31, 31, 50, 1.1, False)
            boost(acc % 13 - 6)
        best = min(best, time.perf_counter() - t0)
    assert acc  # keep the loop honest
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=200_000)
    args = parser.parse_args()

    cases = _workload(np.random.default_rng(0), args.calls)

    t_pure = bench(pure, cases)
    print(f"pure python : {t_pure:.3f}s  "
          f"({args.calls / t_pure / 1e6:.2f}M kernel triples/s)")
    if compiled is None:
        print("compiled    : not built (run `pip install -e .` to build it)")
        return
    # equivalence spot-check before timing the compiled backend
    for case in cases[:1000]:
        assert compiled.damage_amount(*case) == pure.damage_amount(*case)
    t_comp = bench(compiled, cases)
    print(f"compiled    : {t_comp:.3f}s  "
          f"({args.calls / t_comp / 1e6:.2f}M kernel triples/s)")
    print(f"speedup     : {t_pure / t_comp:.2f}x")


if __name__ == "__main__":
    main()
