"""Count h(n) over [1, N] in base 10 (default N = 5*10^8), resumable.

    python scripts/distribution_table.py --limit 500000000 --checkpoint table.ckpt
"""
import argparse
import sys
import time

from economical.scan import SieveConfig, histogram


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=5 * 10**8)
    ap.add_argument("--base", type=int, default=10)
    ap.add_argument("--segment", type=int, default=1 << 22)
    ap.add_argument("--checkpoint", default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    last = [t0]

    def progress(done, hi):
        now = time.perf_counter()
        if now - last[0] > 10:
            print(f"{done:>12} / {hi - 1}  {now - t0:7.1f}s", file=sys.stderr)
            last[0] = now

    hist = histogram(1, args.limit + 1, args.base, SieveConfig(segment_size=args.segment), args.checkpoint, progress)
    print(f"# h distribution for 1 <= n <= {args.limit}, base {args.base}")
    for k in sorted(hist.counts):
        print(f"{k:>4} {hist.counts[k]:>12}")
    print(f"# total {hist.total}, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
