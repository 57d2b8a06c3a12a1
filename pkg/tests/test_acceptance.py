"""Exit criteria.  Each test appends one PASS/FAIL line to the terminal summary."""
import random
import time
from contextlib import contextmanager
from math import gcd

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from economical.construct import (
    Variant,
    build_extravagant,
    build_plan,
    dickson_search,
    extravagant_intervals,
    extravagant_t,
    verify_run,
    verify_run_u64,
)
from economical.digits import delta
from economical.economy import classify, h, phi
from economical.factor import factor_u64, merge, power
from economical.scan import Predicate, SieveConfig, find_runs, first_with_h, histogram, iter_h
from test_construct import FIRST_RUN, NINE_RUN, PAPER_OVERRIDES, POWER_OVERRIDES, POWER_RUN


@contextmanager
def criterion(number, text, max_seconds=None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        if max_seconds is not None:
            assert elapsed < max_seconds, f"took {elapsed:.1f}s, limit {max_seconds}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {text} ({elapsed:.2f}s)")


def test_c01_small_runs():
    with criterion(1, "13..17 and 157..163 are consecutive economical numbers", 1.0):
        assert all(classify(n).economical for n in range(13, 18))
        assert all(classify(n).economical for n in range(157, 164))
        assert not classify(12).economical and not classify(18).economical
        assert not classify(156).economical and not classify(164).economical


def test_c02_run_records_to_1e6():
    with criterion(2, "longest runs below 10^6: economical 7 x5, frugal 2 from 4374", 10.0):
        eco = find_runs(2, 10**6, 10, Predicate.economical(), 1)
        longest = max(r.length for r in eco)
        assert longest == 7
        assert [r.start for r in eco if r.length == longest] == [157, 108749, 109997, 121981, 143421]
        fr = find_runs(2, 10**6, 10, Predicate.frugal(1), 1)
        assert max(r.length for r in fr) == 2
        assert next(r.start for r in fr if r.length == 2) == 4374


PAPER_TABLE = {
    -6: 1313, -5: 195341, -4: 5101112, -3: 44435592, -2: 153988692, -1: 208380123,
    0: 86441875, 1: 1297001, 2: 140575, 3: 16670, 4: 1483, 5: 207, 6: 16,
}


def test_c03_distribution_table():
    with criterion(3, "h distribution over [1, 5*10^8] (after a bit-exact 10^7 oracle check)", 900.0):
        hi = 10**7 + 1
        sieve_values = np.concatenate([v for _, v in iter_h(1, hi, 10)])
        oracle = np.fromiter(
            (delta(n) - phi(factor_u64(n)) for n in range(1, hi)), dtype=np.int16, count=hi - 1
        )
        assert np.array_equal(sieve_values, oracle)

        hist = histogram(1, 5 * 10**8 + 1, 10, SieveConfig(segment_size=1 << 22))
        assert hist.counts == PAPER_TABLE
        assert hist.total == 5 * 10**8


def test_c04_extremal_values():
    with criterion(4, "smallest 6-frugal 40353607, smallest 6-extravagant 8314020"):
        assert first_with_h(10, 10**8, at_least=6) == 40353607 == 7**9
        assert first_with_h(10, 10**7, at_most=-6) == 8314020
        assert factor_u64(8314020) == [(2, 2), (3, 2), (5, 1), (11, 1), (13, 1), (17, 1), (19, 1)]


def test_c05_crt_constants():
    with criterion(5, "CRT constants of both t=7 plans"):
        plan = build_plan(7, 0, 10, Variant.BASELINE, PAPER_OVERRIDES)
        assert plan.f0 == 1800
        assert plan.M == 14196220211350791776356766371800
        assert plan.N0 == 5599355285926686611723646146400
        plan = build_plan(7, 0, 10, Variant.POWER_M0, POWER_OVERRIDES)
        assert plan.M == 2082775632877914851396520000
        assert plan.N0 == 1625787524296851742054440000


def test_c06_big_runs():
    with criterion(6, "eight economical at N0+9M and seven in the power_m0 example, factorizations as printed"):
        plan = build_plan(7, 0, 10, Variant.BASELINE, PAPER_OVERRIDES)
        N = plan.N0 + 9 * plan.M
        reports = verify_run(plan, N, offsets=list(range(-1, 7)))
        assert len(reports) == 8
        for r in reports:
            assert r.exact and r.economical
            assert dict(r.factorization) == FIRST_RUN[r.n - N]
        plan = build_plan(7, 0, 10, Variant.POWER_M0, POWER_OVERRIDES)
        N = plan.N0
        reports = verify_run(plan, N)
        assert len(reports) == 7
        for r in reports:
            assert r.exact and r.economical
            assert dict(r.factorization) == POWER_RUN[r.n - N]


def test_c07_nine_run():
    with criterion(7, "nine consecutive economical from 1034429177995381247", 1.0):
        reports = verify_run_u64(1034429177995381247, 9)
        assert all(r.economical for r in reports)
        assert [dict(r.factorization) for r in reports] == NINE_RUN


def _check_sample(m, n, b, fm, fn, B):
    dm, dn = delta(m, B), delta(n, B)
    # part 2, 3, 4: digit length of sums, products and powers
    assert max(dm, dn) <= delta(m + n, B) <= 1 + max(dm, dn)
    assert dm + dn - 1 <= delta(m * n, B) <= dm + dn
    assert b * dn - b <= delta(n**b, B) <= b * dn
    # part 5, 6: phi of products
    fmn = merge(fm, fn)
    pmn, pm, pn = phi(fmn, B), phi(fm, B), phi(fn, B)
    assert pmn <= pm + pn
    if gcd(m, n) == 1:
        assert pmn == pm + pn
    # part 7 with log2 n replaced by the bit length
    assert phi(power(fn, b), B) <= pn + delta(b, B) * n.bit_length()
    # part 8 (in the direction its derivation gives), 9, 10
    hm, hn = dm - pm, dn - pn
    hmn = delta(m * n, B) - pmn
    assert hmn >= hm + hn - 1
    if hm > 0:
        assert hmn >= hn
        if hn >= 0:
            assert hmn >= 0
    # part 1
    if fm == [(m, 1)]:
        assert hm == 0


def test_c08_property_suites():
    with criterion(8, "Prop 1 (1)-(10): 10^5 random samples x bases {2,10,16}, exhaustive (9)/(10) to 2000"):
        rng = random.Random(20260101)
        for _ in range(10**5):
            m = rng.randrange(1, 10**9)
            n = rng.randrange(1, 10**9)
            b = rng.randrange(2, 21)
            fm, fn = factor_u64(m), factor_u64(n)
            for B in (2, 10, 16):
                _check_sample(m, n, b, fm, fn, B)
        for B in (2, 10, 16):
            hs = [None] + [h(n, B) for n in range(1, 2001)]
            fac = [None] + [factor_u64(n) for n in range(1, 2001)]
            for m in range(1, 2001):
                if hs[m] <= 0:
                    continue
                for n in range(1, 2001):
                    hmn = delta(m * n, B) - phi(merge(fac[m], fac[n]), B)
                    assert hmn >= hs[n]
                    if hs[n] >= 0:
                        assert hmn >= 0


def test_c09_extravagant_construction():
    with criterion(9, "build_extravagant k=1,2,3 gives h = -k; k=2 witness is 1009*1061*1123"):
        for k in (1, 2, 3):
            n, f = build_extravagant(k, 10)
            t = extravagant_t(k, 10)
            assert h(n, 10, f) == -k
            assert len(f) == k + 1 and all(delta(p) == t + 1 for p, _ in f)
        # least prime in each interval, found by plain trial division
        expected = []
        for lo, hi in extravagant_intervals(2, 10):
            expected.append(next(p for p in range(lo, hi + 1) if all(p % d for d in range(2, int(p**0.5) + 1))))
        n, f = build_extravagant(2, 10)
        assert [p for p, _ in f] == expected == [1009, 1061, 1123]
        assert n == 1202226527


@pytest.mark.parametrize("t,k", [(3, 1), (5, 0)])
def test_c10_theorem_pipeline(t, k):
    with criterion(10, f"end-to-end construction t={t}, k={k} within x_limit 10^6"):
        plan = build_plan(t, k, 10)
        found = dickson_search(plan, 0, 10**6)
        assert found is not None
        x, N = found
        reports = verify_run(plan, N)
        assert len(reports) == t
        assert sum(not r.exact for r in reports) == 0
        assert all(r.h >= k for r in reports)
        assert [r.n for r in reports] == [N + j for j in plan.offsets]
        # independent recheck through full 64-bit factorization where it fits
        if N + t < 2**64:
            assert all(r.h >= k for r in verify_run_u64(N, t))
