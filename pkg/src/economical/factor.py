"""Primality testing and factorization.

Below 2^64 everything is exact: Miller-Rabin with verified witness sets and
Pollard rho (Brent) for splitting.  Above 2^64 primality is Baillie-PSW, which
is probabilistic but has no known counterexample.  Large composites are only
split opportunistically, with a bounded rho budget.
"""
from math import gcd, isqrt
import random

U64 = 1 << 64

Factorization = list[tuple[int, int]]


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


TRIAL_LIMIT = 1000
SMALL_PRIMES = _small_primes(TRIAL_LIMIT)
_SMALL_SET = frozenset(SMALL_PRIMES)

# Deterministic Miller-Rabin witness sets, keyed by an exclusive upper bound on n
# (Pomerance-Selfridge-Wagstaff, Jaeschke; the last row is Sorenson-Webster,
# valid to 3.3e24 and so for all n < 2^64).
_MR_WITNESSES = (
    (2_047, (2,)),
    (1_373_653, (2, 3)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (3_825_123_056_546_413_051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (U64, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
)


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's parameter choice (method A)."""
    if isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4

    d = n + 1
    s = (d & -d).bit_length() - 1
    d >>= s

    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_probable_prime(n: int) -> bool:
    """Baillie-PSW: strong base-2 test plus strong Lucas test."""
    if n < 2:
        return False
    for p in SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    return _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n)


def is_prime(n: int) -> bool:
    """Exact for n < 2^64; Baillie-PSW above."""
    if n < 2:
        return False
    if n <= TRIAL_LIMIT:
        return n in _SMALL_SET
    for p in SMALL_PRIMES[:15]:
        if n % p == 0:
            return False
    if n >= U64:
        return is_probable_prime(n)
    for bound, witnesses in _MR_WITNESSES:
        if n < bound:
            return all(_strong_probable_prime(n, a) for a in witnesses)
    raise AssertionError("unreachable")


def _brent(n: int, rng: random.Random, max_iterations: int | None) -> int | None:
    """One Brent rho attempt; returns a nontrivial divisor or None."""
    y = rng.randrange(1, n)
    c = rng.randrange(1, n)
    batch = 128
    g = r = q = 1
    spent = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += batch
        spent += r
        r *= 2
        if max_iterations is not None and spent > max_iterations:
            return None
    if g == n:
        # batch overshot: step back one at a time from the saved point
        while True:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def pollard_brent(n: int, max_iterations: int | None = None, attempts: int = 32) -> int | None:
    """A nontrivial divisor of composite n, or None if the budget runs out.

    Randomness is seeded from n so results never depend on call order.
    """
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    for _ in range(attempts):
        d = _brent(n, rng, max_iterations)
        if d is not None:
            return d
        if max_iterations is not None:
            return None
    return None


def _trial(n: int, bound: int = TRIAL_LIMIT) -> tuple[Factorization, int]:
    out = []
    for p in SMALL_PRIMES:
        if p > bound:
            break
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    return out, n


def _collect(n: int, counts: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = pollard_brent(m)
        stack += [d, m // d]


def factor_u64(n: int) -> Factorization:
    """Complete factorization of 1 <= n < 2^64 as sorted (prime, exponent) pairs."""
    if not 1 <= n < U64:
        raise ValueError(f"factor_u64 needs 1 <= n < 2^64, got {n}")
    out, n = _trial(n)
    if n == 1:
        return out
    if n < (TRIAL_LIMIT + 1) ** 2 or is_prime(n):
        # after trial division by all primes <= 1000 (or up to sqrt), n is prime
        out.append((n, 1))
        return out
    counts: dict[int, int] = {}
    _collect(n, counts)
    return out + sorted(counts.items())


def factor_partial(n: int, rho_iterations: int = 1 << 22) -> tuple[Factorization, list[int]]:
    """Best-effort factorization of an arbitrary-precision n.

    Returns (factorization, unresolved) where ``unresolved`` lists composite
    pieces that rho could not split within its budget.  Those pieces are also
    present in the factorization, each as if it were a prime, so the caller
    can still compute an optimistic phi.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n < U64:
        return factor_u64(n), []
    out, n = _trial(n)
    counts: dict[int, int] = {}
    unresolved: list[int] = []
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m < U64:
            for p, e in factor_u64(m):
                counts[p] = counts.get(p, 0) + e
            continue
        if is_probable_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = pollard_brent(m, max_iterations=rho_iterations)
        if d is None:
            counts[m] = counts.get(m, 0) + 1
            unresolved.append(m)
        else:
            stack += [d, m // d]
    merged = dict(out)
    for p, e in counts.items():
        merged[p] = merged.get(p, 0) + e
    return sorted(merged.items()), sorted(unresolved)


def next_prime_in(lo: int, hi: int) -> int | None:
    """Smallest (probable) prime p with lo < p <= hi, or None."""
    if lo >= hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    p = lo + 1
    if p <= 2:
        return 2 if hi >= 2 else None
    if p % 2 == 0:
        p += 1
    while p <= hi:
        if is_prime(p):
            return p
        p += 2
    return None


def multiply_out(f: Factorization) -> int:
    n = 1
    for p, e in f:
        n *= p**e
    return n


def merge(*fs: Factorization) -> Factorization:
    """Factorization of the product of the given factorizations."""
    counts: dict[int, int] = {}
    for f in fs:
        for p, e in f:
            counts[p] = counts.get(p, 0) + e
    return sorted(counts.items())


def power(f: Factorization, a: int) -> Factorization:
    return [(p, e * a) for p, e in f]
