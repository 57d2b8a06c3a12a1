"""Range scans of h(n) driven by a segmented sieve.

Each segment [lo, hi) is sieved by the primes up to sqrt(hi).  For every prime
p we add delta(p) to phi on multiples of p and bump phi on multiples of p^e
whenever the exponent digit count steps up at e.  The product of the sieved
prime powers is accumulated alongside; n divided by it is 1 or a single prime
above sqrt(hi), whose digits are added last.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from math import isqrt
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .digits import check_base, delta, delta_array, delta_prime
from .factor import Factorization

MAX_HI = 1 << 42

# int64 n, int64 sieved product, int64 quotient, int16 phi, int16 h, bool mask
BYTES_PER_ENTRY = 8 + 8 + 8 + 2 + 2 + 1


class ConfigError(ValueError):
    pass


@dataclass
class SieveConfig:
    segment_size: int = 1 << 21
    workers: int | None = None
    memory_budget: int = 1 << 30

    def __post_init__(self):
        if self.workers is None:
            env = os.environ.get("ECONOMICAL_THREADS")
            self.workers = int(env) if env else (os.cpu_count() or 1)
        if self.segment_size < 1:
            raise ConfigError("segment_size must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        need = self.segment_size * BYTES_PER_ENTRY * self.workers
        if need > self.memory_budget:
            raise ConfigError(
                f"segment_size={self.segment_size} x {self.workers} workers needs "
                f"~{need} bytes, over the {self.memory_budget} byte budget"
            )


@dataclass(frozen=True)
class Predicate:
    """h(n) >= k; k = 0 is 'economical', k >= 1 is 'k-frugal'."""

    k: int = 0

    @classmethod
    def economical(cls) -> Predicate:
        return cls(0)

    @classmethod
    def frugal(cls, k: int = 1) -> Predicate:
        if k < 1:
            raise ValueError("frugal level must be >= 1")
        return cls(k)

    @property
    def label(self) -> str:
        return "economical" if self.k == 0 else f"{self.k}-frugal"

    @classmethod
    def parse(cls, text: str) -> Predicate:
        text = text.strip().lower()
        if text == "economical":
            return cls(0)
        if text == "frugal":
            return cls(1)
        if text.endswith("-frugal"):
            return cls.frugal(int(text[: -len("-frugal")]))
        raise ValueError(f"unknown predicate {text!r}")


@dataclass(frozen=True)
class RunRecord:
    start: int
    length: int
    predicate: Predicate

    def to_json(self) -> dict:
        return {"start": str(self.start), "length": self.length, "predicate": self.predicate.label}


@dataclass
class Histogram:
    lo: int
    hi: int
    base: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, other_counts: dict[int, int]) -> None:
        for k, v in other_counts.items():
            self.counts[k] = self.counts.get(k, 0) + v

    def rows(self) -> list[dict]:
        return [{"h": k, "count": self.counts[k]} for k in sorted(self.counts)]


_PRIME_CACHE: dict[str, np.ndarray] = {}


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit, by a plain sieve of Eratosthenes."""
    cached = _PRIME_CACHE.get("p")
    if cached is not None and (cached.size and _PRIME_CACHE["limit"][0] >= limit):
        return cached[cached <= limit]
    size = max(limit, 16)
    flags = np.ones(size + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(size) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    _PRIME_CACHE["p"] = primes
    _PRIME_CACHE["limit"] = np.array([size])
    return primes[primes <= limit]


class _Sieve:
    """Per-base tables shared by all segments of one scan."""

    def __init__(self, hi: int, B: int):
        check_base(B)
        if hi > MAX_HI:
            raise ConfigError(f"scan bound {hi} exceeds the supported 2^42")
        self.B = B
        self.primes = [int(p) for p in base_primes(isqrt(max(hi - 1, 1)))]
        self.prime_digits = [delta(p, B) for p in self.primes]
        # phi increment when an exponent grows from e-1 to e (e >= 2)
        self.exp_step = [0, 0] + [delta_prime(e, B) - delta_prime(e - 1, B) for e in range(2, 64)]

    def h_segment(self, lo: int, hi: int) -> np.ndarray:
        size = hi - lo
        phi = np.zeros(size, dtype=np.int16)
        sieved = np.ones(size, dtype=np.int64)
        exp_step = self.exp_step
        for p, dp in zip(self.primes, self.prime_digits):
            start = -lo % p
            if start >= size:
                continue
            phi[start::p] += dp
            sieved[start::p] *= p
            q = p * p
            e = 2
            while q < hi:
                start = -lo % q
                if start < size:
                    sieved[start::q] *= p
                    if exp_step[e]:
                        phi[start::q] += exp_step[e]
                q *= p
                e += 1
        n = np.arange(lo, hi, dtype=np.int64)
        rest = n // sieved
        big = rest > 1
        phi[big] += delta_array(rest[big], self.B)
        return delta_array(n, self.B) - phi

    def factor_segment(self, lo: int, hi: int) -> list[Factorization]:
        size = hi - lo
        rest = np.arange(lo, hi, dtype=np.int64)
        idx_parts = []
        prime_parts = []
        exp_parts = []
        for p in self.primes:
            start = -lo % p
            if start >= size:
                continue
            idx = np.arange(start, size, p)
            e = np.zeros(idx.size, dtype=np.int64)
            sub = rest[idx]
            while True:
                hit = sub % p == 0
                if not hit.any():
                    break
                e += hit
                sub = np.where(hit, sub // p, sub)
            rest[idx] = sub
            idx_parts.append(idx)
            prime_parts.append(np.full(idx.size, p, dtype=np.int64))
            exp_parts.append(e)
        out: list[Factorization] = [[] for _ in range(size)]
        if idx_parts:
            idx = np.concatenate(idx_parts)
            primes = np.concatenate(prime_parts)
            exps = np.concatenate(exp_parts)
            order = np.argsort(idx, kind="stable")
            for i, p, e in zip(idx[order].tolist(), primes[order].tolist(), exps[order].tolist()):
                out[i].append((p, e))
        for i in np.flatnonzero(rest > 1).tolist():
            out[i].append((int(rest[i]), 1))
        return out


def _segments(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def _ordered_map(fn: Callable, items: Iterable, workers: int) -> Iterator:
    """Map in a worker pool but yield results strictly in input order."""
    items = iter(items)
    if workers == 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            chunk = list(islice(items, 2 * workers))
            if not chunk:
                return
            yield from pool.map(fn, chunk)


def iter_h(lo: int, hi: int, B: int = 10, config: SieveConfig | None = None) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (segment_lo, h values) for consecutive segments covering [lo, hi)."""
    if lo < 1:
        raise ValueError("scans start at n >= 1")
    if lo >= hi:
        return
    config = config or SieveConfig()
    sieve = _Sieve(hi, B)
    segs = _segments(lo, hi, config.segment_size)
    for (a, _), values in zip(segs, _ordered_map(lambda s: sieve.h_segment(*s), segs, config.workers)):
        yield a, values


def sieve_segment(
    lo: int,
    hi: int,
    B: int = 10,
    consumer: Callable[[int, Factorization], None] | None = None,
    config: SieveConfig | None = None,
) -> None:
    """Stream (n, factorization) for every n in [lo, hi) to ``consumer``."""
    if lo < 1 or lo >= hi:
        raise ValueError(f"need 1 <= lo < hi, got {lo}, {hi}")
    config = config or SieveConfig()
    sieve = _Sieve(hi, B)
    segs = _segments(lo, hi, config.segment_size)
    for (a, _), facs in zip(segs, _ordered_map(lambda s: sieve.factor_segment(*s), segs, config.workers)):
        for i, f in enumerate(facs):
            consumer(a + i, f)


def _bincount(values: np.ndarray) -> dict[int, int]:
    if values.size == 0:
        return {}
    low = int(values.min())
    counts = np.bincount(values.astype(np.int64) - low)
    return {low + int(i): int(c) for i, c in enumerate(counts) if c}


def read_checkpoint(path: Path) -> tuple[int, int, int, int, dict[int, int]] | None:
    """Parse a checkpoint file into (lo, hi, base, next, counts)."""
    path = Path(path)
    if not path.exists():
        return None
    header: dict[str, int] = {}
    counts: dict[int, int] = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, value = line.split()
        if key in ("lo", "hi", "base", "next"):
            header[key] = int(value)
        else:
            counts[int(key)] = int(value)
    return header["lo"], header["hi"], header["base"], header["next"], counts


def write_checkpoint(path: Path, lo: int, hi: int, B: int, done: int, counts: dict[int, int]) -> None:
    """Plain-text checkpoint: header lines, then one 'h count' line per value."""
    path = Path(path)
    lines = ["# economical histogram checkpoint", f"lo {lo}", f"hi {hi}", f"base {B}", f"next {done}"]
    lines += [f"{k} {counts[k]}" for k in sorted(counts)]
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def histogram(
    lo: int,
    hi: int,
    B: int = 10,
    config: SieveConfig | None = None,
    checkpoint: str | Path | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> Histogram:
    """Counts of each h value over [lo, hi)."""
    check_base(B)
    result = Histogram(lo, hi, B)
    start = lo
    if checkpoint is not None:
        state = read_checkpoint(checkpoint)
        if state is not None:
            c_lo, c_hi, c_base, c_next, counts = state
            if (c_lo, c_hi, c_base) != (lo, hi, B):
                raise ConfigError(f"checkpoint {checkpoint} is for a different scan")
            start = c_next
            result.add(counts)
    for a, values in iter_h(start, hi, B, config):
        result.add(_bincount(values))
        done = a + values.size
        if checkpoint is not None:
            write_checkpoint(checkpoint, lo, hi, B, done, result.counts)
        if progress is not None:
            progress(done, hi)
    return result


class RunStitcher:
    """Collects maximal runs of True across consecutive boolean segments."""

    def __init__(self, predicate: Predicate, min_len: int):
        self.predicate = predicate
        self.min_len = min_len
        self.open_start: int | None = None
        self.runs: list[RunRecord] = []

    def _close(self, start: int, end: int) -> None:
        if end - start >= self.min_len:
            self.runs.append(RunRecord(start, end - start, self.predicate))

    def feed(self, seg_lo: int, mask: np.ndarray) -> None:
        if mask.size == 0:
            return
        edges = np.diff(np.concatenate(([0], mask.view(np.int8), [0])))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        if self.open_start is not None:
            if starts.size and starts[0] == 0:
                starts = starts.copy()
                starts[0] = self.open_start - seg_lo
            else:
                self._close(self.open_start, seg_lo)
            self.open_start = None
        seg_end = mask.size
        for s, e in zip(starts.tolist(), ends.tolist()):
            if e == seg_end:
                self.open_start = seg_lo + s
            else:
                self._close(seg_lo + s, seg_lo + e)

    def finish(self, hi: int) -> list[RunRecord]:
        if self.open_start is not None:
            self._close(self.open_start, hi)
            self.open_start = None
        return self.runs


def find_runs(
    lo: int,
    hi: int,
    B: int = 10,
    predicate: Predicate = Predicate(0),
    min_len: int = 1,
    config: SieveConfig | None = None,
) -> list[RunRecord]:
    """Maximal runs in [lo, hi) of consecutive n with h(n) >= predicate.k.

    Maximality is relative to the scanned range: a run touching lo or hi is
    reported as cut there.
    """
    if lo >= hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    stitcher = RunStitcher(predicate, min_len)
    for a, values in iter_h(lo, hi, B, config):
        stitcher.feed(a, values >= predicate.k)
    return stitcher.finish(hi)


def first_with_h(
    B: int = 10,
    limit: int = 10**8,
    *,
    at_least: int | None = None,
    at_most: int | None = None,
    config: SieveConfig | None = None,
) -> int | None:
    """Smallest n <= limit with h(n) >= at_least (or h(n) <= at_most)."""
    if (at_least is None) == (at_most is None):
        raise ValueError("give exactly one of at_least / at_most")
    for a, values in iter_h(1, limit + 1, B, config):
        hit = values >= at_least if at_least is not None else values <= at_most
        idx = np.flatnonzero(hit)
        if idx.size:
            return a + int(idx[0])
    return None
