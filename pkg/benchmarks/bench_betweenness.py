#!/usr/bin/env python3
"""Compare the compiled and pure-Python betweenness kernels.

Runs both backends on identical random graphs of increasing size and
reports wall time per call plus the speedup.  Results also double as a
parity check: the two implementations must agree bit for bit.

Usage: python benchmarks/bench_betweenness.py [--sizes 50,100,200]
       [--density 0.08] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from teamnet import kernels


def random_csr(rng: random.Random, n: int, density: float):
    pairs = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                pairs.add((u, v))
                pairs.add((v, u))
    return kernels.csr_adjacency(n, pairs)


def time_backend(impl, n, indptr, indices, repeats: int) -> tuple[float, list]:
    best = float("inf")
    counts = None
    for _ in range(repeats):
        started = time.perf_counter()
        counts = impl.betweenness_counts(n, indptr, indices, indptr, indices)
        best = min(best, time.perf_counter() - started)
    return best, list(counts)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,200,400",
                        help="comma-separated node counts")
    parser.add_argument("--density", type=float, default=0.08,
                        help="edge probability")
    parser.add_argument("--repeats", type=int, default=3,
                        help="take the best of this many runs")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    backends = kernels.backends()
    if "compiled" not in backends:
        print("compiled kernel not built; benchmarking python backend only")
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = random.Random(args.seed)

    header = f"{'nodes':>6} {'edges':>7}"
    for name in backends:
        header += f" {name + ' (ms)':>14}"
    if len(backends) > 1:
        header += f" {'speedup':>8}"
    print(header)

    for n in sizes:
        indptr, indices = random_csr(rng, n, args.density)
        row = f"{n:>6} {len(indices) // 2:>7}"
        times = {}
        results = {}
        for name, impl in backends.items():
            times[name], results[name] = time_backend(
                impl, n, indptr, indices, args.repeats)
            row += f" {times[name] * 1e3:>14.2f}"
        if len(results) > 1:
            values = list(results.values())
            if any(v != values[0] for v in values[1:]):
                print(row)
                print("ERROR: backends disagree", file=sys.stderr)
                return 1
            row += f" {times['python'] / times['compiled']:>7.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
