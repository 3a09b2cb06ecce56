"""Time the numba kernels against the interpreted fallback.

    python benchmarks/bench_kernels.py --states 20 --count 10

Both backends run on the same instances; the numba path is warmed up once
so compile time is reported separately.
"""

import argparse
import time

import numpy as np

from vpamin import RandomSpec, generate
from vpamin.encode import build_instance
from vpamin.oracle import bounded_equiv
from vpamin.quotient import build_quotient
from vpamin.partition import StatePartition
from vpamin.reachability import compute_tops, initial_partition, make_live
from vpamin.solver import solve_instance


def instances(n, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        spec = RandomSpec(n, 2, 2, 2, accept_density=0.5, trans_density=float(rng.choice([1.0, 2.0])),
                          stack_density=0.5, seed=int(rng.integers(2**63)))
        live = make_live(generate(spec), returns_only=True)
        # identity quotient: same language, so the check explores every length
        out.append((live, build_quotient(live, StatePartition.discrete(live.n_states))))
    return out


def stages(live, other, backend, max_len):
    t = {}
    t0 = time.perf_counter()
    tops = compute_tops(live, backend)
    t["tops"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    db = build_instance(live, tops, initial_partition(live), True, backend=backend)
    t["encode"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    solve_instance(db, backend)
    t["solve"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    bounded_equiv(live, other, max_len, backend)
    t["bounded_equiv"] = time.perf_counter() - t0
    return t


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=20)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--max-len", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    work = instances(args.states, args.count, args.seed)
    t0 = time.perf_counter()
    stages(*work[0], "numba", args.max_len)
    print(f"numba warm-up (compile): {time.perf_counter() - t0:.2f}s")

    totals = {b: {} for b in ("numba", "python")}
    for backend in totals:
        for live, other in work:
            for k, v in stages(live, other, backend, args.max_len).items():
                totals[backend][k] = totals[backend].get(k, 0.0) + v
    print(f"{args.count} instances, {args.states} states, bounded length {args.max_len}")
    print(f"{'stage':<14}{'numba ms':>12}{'python ms':>12}{'speedup':>10}")
    for k in totals["numba"]:
        a, b = totals["numba"][k] * 1e3, totals["python"][k] * 1e3
        print(f"{k:<14}{a:>12.1f}{b:>12.1f}{b / a if a else float('inf'):>9.1f}x")


if __name__ == "__main__":
    main()
