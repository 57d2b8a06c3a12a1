import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from economical.economy import h
from economical.factor import factor_u64
from economical.scan import (
    ConfigError,
    Predicate,
    RunRecord,
    SieveConfig,
    find_runs,
    first_with_h,
    histogram,
    iter_h,
    read_checkpoint,
    sieve_segment,
)
from oracles import h_ref

ONE = SieveConfig(workers=1)


def collect(lo, hi, config=ONE):
    out = {}
    sieve_segment(lo, hi, 10, lambda n, f: out.__setitem__(n, f), config)
    return out


def test_sieve_segment_small():
    out = collect(2, 20)
    assert list(out) == list(range(2, 20))
    assert out[14] == [(2, 1), (7, 1)]
    assert all(out[n] == factor_u64(n) for n in out)


def test_sieve_segment_single_points():
    rng = random.Random(1)
    for _ in range(1000):
        n = rng.randrange(2, 10**9)
        assert collect(n, n + 1) == {n: factor_u64(n)}


def test_sieve_segment_multiplicity_sum():
    total = 0

    def add(n, f):
        nonlocal total
        total += sum(e for _, e in f)

    hi = 10**6
    sieve_segment(2, hi, 10, add, SieveConfig(segment_size=1 << 17, workers=1))
    direct = sum(sum(e for _, e in factor_u64(n)) for n in range(2, hi))
    assert total == direct
    # mean of Omega(n) is ln ln n + B2 with B2 ~ 1.0346
    approx = hi * (math.log(math.log(hi)) + 1.0346)
    assert abs(total - approx) / approx < 0.01


def test_memory_budget():
    with pytest.raises(ConfigError):
        SieveConfig(segment_size=10**9, workers=1, memory_budget=1 << 20)


def test_histogram_examples():
    assert histogram(2, 3, 10, ONE).counts == {0: 1}
    assert histogram(1, 10, 10, ONE).counts == {-1: 4, 0: 4, 1: 1}


def test_histogram_matches_oracle_to_1e6():
    hist = histogram(1, 10**6, 10, SieveConfig(segment_size=1 << 16))
    oracle = {}
    for n in range(1, 10**6):
        v = len(str(n)) - sum(len(str(p)) + (len(str(a)) if a > 1 else 0) for p, a in factor_u64(n))
        oracle[v] = oracle.get(v, 0) + 1
    assert hist.counts == oracle
    assert hist.total == 10**6 - 1


@pytest.mark.parametrize("B", [2, 3, 7, 10, 16, 64])
def test_per_n_equivalence_to_1e5(B):
    values = np.concatenate([v for _, v in iter_h(2, 10**5, B, SieveConfig(segment_size=7919))])
    assert values.tolist() == [h(n, B) for n in range(2, 10**5)]


def test_per_n_against_trial_division_oracle():
    values = np.concatenate([v for _, v in iter_h(1, 20000, 10, ONE)])
    assert values.tolist() == [h_ref(n) for n in range(1, 20000)]


@settings(max_examples=25)
@given(st.integers(1, 10**7), st.integers(1, 5000), st.sampled_from([2, 10, 16]))
def test_histogram_totals(lo, width, B):
    hist = histogram(lo, lo + width, B, SieveConfig(segment_size=997, workers=1))
    assert hist.total == width


def test_segment_size_independence():
    results = []
    for size in (10**4, 10**5, 10**6):
        cfg = SieveConfig(segment_size=size)
        hist = histogram(2, 10**7, 10, cfg)
        runs = find_runs(2, 10**7, 10, Predicate.economical(), 5, cfg)
        frugal = find_runs(2, 10**7, 10, Predicate.frugal(1), 2, cfg)
        results.append((hist.counts, runs, frugal))
    assert results[0] == results[1] == results[2]


def test_thread_count_independence():
    a = histogram(1, 2 * 10**6, 10, SieveConfig(segment_size=10**5, workers=1))
    b = histogram(1, 2 * 10**6, 10, SieveConfig(segment_size=10**5, workers=4))
    assert a.counts == b.counts


def test_find_runs_examples():
    runs = find_runs(13, 18, 10, Predicate.economical(), 5, ONE)
    assert runs == [RunRecord(13, 5, Predicate(0))]
    runs = find_runs(2, 10**6, 10, Predicate.economical(), 7)
    assert [(r.start, r.length) for r in runs] == [(s, 7) for s in (157, 108749, 109997, 121981, 143421)]
    frugal = find_runs(2, 10**6, 10, Predicate.frugal(1), 2)
    assert frugal[0].start == 4374
    assert max(r.length for r in frugal) == 2


def test_runs_are_maximal_across_tiny_segments():
    # segment boundaries inside the run 157..163
    for size in (1, 2, 3, 5, 7):
        runs = find_runs(100, 200, 10, Predicate.economical(), 7, SieveConfig(segment_size=size, workers=1))
        assert runs == [RunRecord(157, 7, Predicate(0))]


@settings(max_examples=30)
@given(st.integers(1, 5000), st.integers(1, 400), st.integers(1, 50), st.integers(0, 2))
def test_runs_match_brute_force(lo, width, seg, k):
    hi = lo + width
    got = find_runs(lo, hi, 10, Predicate(k), 1, SieveConfig(segment_size=seg, workers=1))
    flags = [h(n) >= k for n in range(lo, hi)]
    want = []
    i = 0
    while i < len(flags):
        if flags[i]:
            j = i
            while j < len(flags) and flags[j]:
                j += 1
            want.append(RunRecord(lo + i, j - i, Predicate(k)))
            i = j
        else:
            i += 1
    assert got == want


def test_predicate_labels():
    assert Predicate.parse("economical") == Predicate(0)
    assert Predicate.parse("frugal") == Predicate(1)
    assert Predicate.parse("3-frugal").label == "3-frugal"
    with pytest.raises(ValueError):
        Predicate.parse("wasteful")


def test_first_with_h_examples():
    assert first_with_h(10, 100, at_least=1) == 1
    assert first_with_h(10, 10**7, at_most=-6) == 8314020
    assert first_with_h(10, 8314019, at_most=-6) is None
    with pytest.raises(ValueError):
        first_with_h(10, 100)


def test_checkpoint_resume(tmp_path):
    path = tmp_path / "hist.ckpt"
    cfg = SieveConfig(segment_size=10**5, workers=1)

    class Stop(Exception):
        pass

    def interrupt(done, hi):
        if done >= 5 * 10**5:
            raise Stop

    with pytest.raises(Stop):
        histogram(1, 10**6 + 1, 10, cfg, checkpoint=path, progress=interrupt)
    lo, hi, base, nxt, partial = read_checkpoint(path)
    assert (lo, hi, base, nxt) == (1, 10**6 + 1, 10, 5 * 10**5 + 1)
    assert sum(partial.values()) == 5 * 10**5
    resumed = histogram(1, 10**6 + 1, 10, cfg, checkpoint=path)
    assert resumed.counts == histogram(1, 10**6 + 1, 10, cfg).counts
    with pytest.raises(ConfigError):
        histogram(1, 10**6, 10, cfg, checkpoint=path)
