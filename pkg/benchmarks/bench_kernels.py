"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--quick] [--repeat 3]

Each row runs the same call on both backends, checks the outputs agree and
prints the best wall time of ``--repeat`` runs.
"""

import argparse
import time

import numpy as np

from oddcolor import kernels
from oddcolor.cfls import build_cfls_coloring
from oddcolor.knn import random_greedy_stage1
from oddcolor.verify import builtin_patterns, color_hashes


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return a == b


def cases(quick):
    c2, _ = build_cfls_coloring(2)
    c3, _ = build_cfls_coloring(3)
    m2 = np.ascontiguousarray(c2.matrix)
    m3 = np.ascontiguousarray(c3.matrix)
    h2, h3 = color_hashes(c2.num_colors), color_hashes(c3.num_colors)
    nsamp = 20_000 if quick else 200_000
    fig3d = builtin_patterns()[7]
    reps = fig3d.representatives()
    pg = fig3d.pos_group()
    prof = np.zeros(0, dtype=np.int32)
    nk = 24 if quick else 40
    s1 = random_greedy_stage1(nk, 3)
    F = np.ascontiguousarray(s1.F.matrix)
    rng = np.random.default_rng(0)
    bip = rng.integers(0, nk, (nk, nk)).astype(np.int32)
    yield "K5 odd scan, n=16 exhaustive", lambda b: b.clique_scan(m2, h2, 5, 0, 0, 0, 16, 100)
    yield f"K4 odd scan, n=512 {nsamp} samples", lambda b: b.clique_sample(m3, h3, 4, 0, 0, 1, 0, nsamp, 100)
    yield f"(5,4) scan, n=512 {nsamp} samples", lambda b: b.clique_sample(m3, h3, 5, 1, 4, 1, 0, nsamp, 100)
    yield "fig3d pattern, n=16 exhaustive", lambda b: b.pattern_scan(m2, 5, pg, 3, True, prof, reps, 0, 16, 100)
    yield f"C4 scan, K_{{{nk},{nk}}}", lambda b: b.c4_scan(bip, 0, nk, False, 100)
    yield f"stage 1, n={nk}", lambda b: b.stage1_run(nk, 3, 20 * nk, True)
    yield f"stage 2, n={nk}", lambda b: b.stage2_run(F, int(np.ceil(nk ** 0.75)), 2.0, 50 * int((F < 0).sum()), 3)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backs = kernels.available()
    if "cython" not in backs:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'case':40s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases(args.quick):
        tp, op = best_of(lambda: fn(backs["python"]), args.repeat)
        if "cython" in backs:
            tc, oc = best_of(lambda: fn(backs["cython"]), args.repeat)
            mark = "" if same(op, oc) else "  OUTPUT MISMATCH"
            print(f"{name:40s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}{mark}")
        else:
            print(f"{name:40s} {tp:11.4f} {'-':>11s} {'-':>8s}")


if __name__ == "__main__":
    main()
