"""Longest runs of economical and frugal numbers below a bound, plus the
smallest numbers with |h| >= 6."""
import sys

from economical.scan import Predicate, find_runs, first_with_h

limit = int(sys.argv[1]) if len(sys.argv) > 1 else 10**6

for pred in (Predicate.economical(), Predicate.frugal(1)):
    runs = find_runs(2, limit, 10, pred, 1)
    longest = max(r.length for r in runs)
    starts = [r.start for r in runs if r.length == longest]
    print(f"{pred.label:>10}: longest run {longest}, starting at {starts[:10]}")

print("smallest 6-frugal:", first_with_h(10, 10**8, at_least=6))
print("smallest 6-extravagant:", first_with_h(10, 10**7, at_most=-6))
