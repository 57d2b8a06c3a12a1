"""Search for runs of t consecutive k-frugal numbers by CRT + simultaneous primes.

    python scripts/search_runs.py 5 0 --variant shifted --x-limit 1000000
"""
import argparse
import time

from economical.construct import build_plan, dickson_search, verify_run

ap = argparse.ArgumentParser()
ap.add_argument("t", type=int)
ap.add_argument("k", type=int)
ap.add_argument("--base", type=int, default=10)
ap.add_argument("--variant", default="baseline")
ap.add_argument("--x-limit", type=int, default=10**6)
args = ap.parse_args()

plan = build_plan(args.t, args.k, args.base, args.variant)
print(f"f0={plan.f0} m={plan.m} M={plan.M}")
t0 = time.perf_counter()
found = dickson_search(plan, 0, args.x_limit, block=1 << 18)
print(f"search: {found} in {time.perf_counter() - t0:.1f}s")
if found:
    for r in verify_run(plan, found[1]):
        print(f"  {r.n}  h={r.h}  exact={r.exact}")
