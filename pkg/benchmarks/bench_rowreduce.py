#!/usr/bin/env python3
"""Benchmark: compiled row-reduction kernel vs the pure-Python fallback.

Workloads mirror what the library actually funnels through the kernel:
dense random integer matrices and the (large, sparse) Chevalley-Eilenberg
differential of the Galilean algebra acting on degree-3 polynomials in four
variables -- the single heaviest elimination in the acceptance suite.

Run:  python benchmarks/bench_rowreduce.py
"""

import random
import time

from lagfloor._rowreduce_py import row_reduce as reduce_py

try:
    from lagfloor._rowreduce import row_reduce as reduce_c
except ImportError:
    reduce_c = None


def dense_random(seed, rows, cols, lo=-9, hi=9):
    rng = random.Random(seed)
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def sparse_random(seed, rows, cols, density=0.05):
    rng = random.Random(seed)
    return [
        [rng.randint(-3, 3) if rng.random() < density else 0 for _ in range(cols)]
        for _ in range(rows)
    ]


def ce_galilean_rows():
    from lagfloor.cecohom import ce_differential
    from lagfloor.expr import function_monomials, mono_expr
    from lagfloor.pairs import closure_module, standard_pair

    pair = standard_pair("galilean_r4")
    seeds = [mono_expr(pair.chart, m) for m in function_monomials(pair.chart, 3, 0)]
    fm = closure_module(pair, seeds, cap=64)
    d = ce_differential(pair.algebra, fm.module, 1)
    return [[int(x) for x in d.row(i)] for i in range(d.rows)], d.cols


def timed(fn, rows, ncols, repeat=3):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(rows, ncols)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def main():
    workloads = [
        ("dense 60x60", *([dense_random(1, 60, 60)], 60)),
        ("dense 120x80", *([dense_random(2, 120, 80)], 80)),
        ("sparse 400x200", *([sparse_random(3, 400, 200)], 200)),
    ]
    rows, cols = ce_galilean_rows()
    workloads.append((f"CE galilean C1->C2 ({len(rows)}x{cols})", [rows], cols))

    print(f"{'workload':<36} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>9}")
    for name, wrapped, ncols in workloads:
        data = wrapped[0]
        t_py, out_py = timed(reduce_py, data, ncols)
        if reduce_c is None:
            print(f"{name:<36} {t_py:>10.4f} {'unavailable':>13} {'-':>9}")
            continue
        t_c, out_c = timed(reduce_c, data, ncols)
        assert out_py == out_c, "kernel outputs diverged"
        print(f"{name:<36} {t_py:>10.4f} {t_c:>13.4f} {t_py / t_c:>8.2f}x")


if __name__ == "__main__":
    main()
