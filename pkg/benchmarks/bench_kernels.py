#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallbacks.

Runs each hot kernel (uniform / partition / graphic greedy, matching
branch-and-bound) over many random activation masks and reports the
per-call time for both implementations plus the speedup.

Usage:
    python3 benchmarks/bench_kernels.py [--masks N] [--elements N] [--seed S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sposs import _kernels_py
from sposs._core import HAVE_EXT, kernels as selected

if HAVE_EXT:
    from sposs import _ckernels
else:
    _ckernels = None


def _order(w):
    n = len(w)
    return np.array(sorted(range(n), key=lambda e: (-w[e], e)), dtype=np.int32)


def make_workload(n, n_masks, seed):
    rng = np.random.default_rng(seed)
    w = rng.random(n) + 0.1
    order = _order(w)
    masks = (rng.random((n_masks, n)) < 0.5).astype(np.uint8)
    block = rng.integers(0, 4, size=n).astype(np.int32)
    caps = np.full(4, max(1, n // 8), dtype=np.int64)
    n_vertices = max(4, n // 2)
    eu = rng.integers(0, n_vertices, size=n).astype(np.int32)
    ev = rng.integers(0, n_vertices, size=n).astype(np.int32)
    return w, order, masks, block, caps, eu, ev, n_vertices


def bench(fn, calls):
    start = time.perf_counter()
    total = 0.0
    for args in calls:
        val, _ = fn(*args)
        total += val
    return time.perf_counter() - start, total


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--masks", type=int, default=2000)
    ap.add_argument("--elements", type=int, default=64)
    ap.add_argument("--matching-edges", type=int, default=18,
                    help="edge count for the matching branch-and-bound")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_EXT:
        print("compiled extension not available; benchmarking fallback only")

    n = args.elements
    w, order, masks, block, caps, eu, ev, nv = make_workload(
        n, args.masks, args.seed)
    mw, morder, mmasks, _, _, meu, mev, mnv = make_workload(
        args.matching_edges, args.masks, args.seed + 1)

    suites = {
        "uniform_opt": [(order, w, m, n // 4) for m in masks],
        "partition_opt": [(order, w, m, block, caps) for m in masks],
        "graphic_opt": [(order, w, m, eu, ev, nv) for m in masks],
        "matching_opt": [(morder, mw, m, meu, mev, mnv) for m in mmasks],
    }

    print(f"{args.masks} masks, {n} elements "
          f"({args.matching_edges} edges for matching)\n")
    print(f"{'kernel':<15} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, calls in suites.items():
        t_py, v_py = bench(getattr(_kernels_py, name), calls)
        line = f"{name:<15} {t_py / len(calls) * 1e6:>10.2f}us"
        if _ckernels is not None:
            t_c, v_c = bench(getattr(_ckernels, name), calls)
            assert abs(v_py - v_c) < 1e-9 * max(1.0, abs(v_py)), name
            line += f" {t_c / len(calls) * 1e6:>10.2f}us {t_py / t_c:>8.1f}x"
        print(line)
    print(f"\nselected at import: "
          f"{'compiled' if selected.IS_COMPILED else 'pure python'}")


if __name__ == "__main__":
    main()
