"""Compare the compiled and pure-Python kernels on synthetic workloads.

    python benchmarks/bench_kernels.py [--scale N] [--repeat R] [--json OUT]

Both backends get identical inputs; their outputs are checked for equality
before any timing is reported.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from cover import kernels


def unification_workload(n: int, seed: int):
    rng = random.Random(seed)
    m = 3 * n
    kinds = kernels.i64(kernels.UNIFY if rng.random() < 0.4 else kernels.POINTS_TO for _ in range(m))
    lhs = kernels.i64(rng.randrange(n) for _ in range(m))
    rhs = kernels.i64(rng.randrange(n) for _ in range(m))
    return n, kinds, lhs, rhs


def run_unification(impl: str, work):
    n, kinds, lhs, rhs = work
    parent = kernels.i64(range(n))
    pts = kernels.i64([-1] * n)
    merges = kernels.solve_unification(parent, pts, kinds, lhs, rhs, impl=impl)
    return merges, parent.tobytes(), pts.tobytes()


def access_workload(n: int, seed: int):
    rng = random.Random(seed)
    nreg = max(1, n // 10)
    opens = sorted(rng.randrange(n * 4) for _ in range(nreg))
    r_open = kernels.i64(opens)
    r_close = kernels.i64(o + rng.randrange(1, 200) for o in opens)
    lo = [rng.randrange(0, 1 << 16, 8) for _ in range(nreg)]
    r_lo = kernels.i64(lo)
    r_hi = kernels.i64(x + rng.choice((8, 64, 512)) for x in lo)
    r_mask = kernels.i64(rng.choice((1, 2, 3)) for _ in range(nreg))
    seqs = sorted(rng.sample(range(n * 4), n))
    e_seq = kernels.i64(seqs)
    elo = [rng.randrange(0, 1 << 16, 8) for _ in range(n)]
    e_lo = kernels.i64(elo)
    e_hi = kernels.i64(x + 8 for x in elo)
    e_mask = kernels.i64(rng.choice((1, 2)) for _ in range(n))
    return r_open, r_close, r_lo, r_hi, r_mask, e_seq, e_lo, e_hi, e_mask


def run_access(impl: str, work):
    out = kernels.i64([-1] * len(work[5]))
    hits = kernels.match_accesses(*work, out, impl=impl)
    return hits, out.tobytes()


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=100_000, help="nodes / memory events per workload")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", metavar="OUT", help="also write results as JSON")
    args = ap.parse_args(argv)

    impls = ["python"]
    try:
        kernels.backend("cython")
        impls.insert(0, "cython")
    except ImportError:
        print("compiled kernels not built; timing the Python fallback only", file=sys.stderr)

    rows = []
    for name, make, run in (
        ("solve_unification", unification_workload, run_unification),
        ("match_accesses", access_workload, run_access),
    ):
        work = make(args.scale, args.seed)
        results = {impl: run(impl, work) for impl in impls}
        if len({r for r in results.values()}) != 1:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        times = {impl: best_of(lambda: run(impl, work), args.repeat) for impl in impls}
        row = {"kernel": name, "scale": args.scale, **{f"{k}_s": round(v, 5) for k, v in times.items()}}
        if "cython" in times and times["cython"] > 0:
            row["speedup"] = round(times["python"] / times["cython"], 1)
        rows.append(row)

    for row in rows:
        cols = "  ".join(f"{k}={v}" for k, v in row.items() if k != "kernel")
        print(f"{row['kernel']:18} {cols}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
