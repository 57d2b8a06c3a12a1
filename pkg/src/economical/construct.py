"""Constructions: frugal multipliers, extravagant products, and runs of
consecutive k-frugal numbers built by CRT plus a simultaneous-prime search.

A run plan fixes N modulo M so that every covered N + j equals
(f_j * m_j) * C_j, where f_j carries the forced small prime powers,
m_j is a multiplier chosen so that f_j * m_j is (k+1)-frugal, and the
cofactor C_j = S_j + M_j * x is linear in the search variable x.  When all
cofactors are prime, every covered N + j is k-frugal.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import islice
from math import gcd

import numpy as np

from .digits import check_base, delta
from .economy import EconomyReport, classify, h as h_of
from .factor import (
    U64,
    Factorization,
    factor_partial,
    factor_u64,
    is_prime,
    is_probable_prime,
    merge,
    multiply_out,
    next_prime_in,
    power,
)
from .scan import base_primes

# theta = 107/200, the exponent in the prime-in-short-interval bound
THETA = Fraction(107, 200)


class Variant(str, Enum):
    BASELINE = "baseline"
    SHIFTED = "shifted"
    POWER_M0 = "power_m0"


def _next_prime_after(n: int) -> int:
    p = n + 1
    while not is_prime(p):
        p += 1
    return p


def _h(f: Factorization, B: int) -> int:
    return h_of(multiply_out(f), B, f)


def frugal_sample(
    r: int,
    s: int,
    k: int,
    B: int = 10,
    p: int | None = None,
    r_factors: Factorization | None = None,
) -> tuple[int, Factorization]:
    """n = r * p^a with p the least prime above r*s and a >= 2 minimal with h(n) >= k.

    ``p`` may be forced; it must be a prime not dividing r*s.
    """
    check_base(B)
    if gcd(r, s) != 1:
        raise ValueError(f"r={r} and s={s} must be coprime")
    if p is None:
        p = _next_prime_after(r * s)
    elif not is_prime(p) or (r * s) % p == 0:
        raise ValueError(f"forced p={p} must be a prime coprime to r*s")
    base = r_factors if r_factors is not None else factor_u64(r)
    a = 2
    while True:
        f = merge(base, [(p, a)])
        if _h(f, B) >= k:
            return multiply_out(f), f
        a += 1


def frugal_power(r: int, k: int, B: int = 10, r_factors: Factorization | None = None) -> tuple[int, Factorization]:
    """r^a for the least a >= 2 with h(r^a) >= k.  Requires r >= B."""
    check_base(B)
    if r < B:
        raise ValueError(f"frugal_power needs r >= base ({r} < {B})")
    f = r_factors if r_factors is not None else factor_u64(r)
    a = _least_frugal_exponent(f, k, B)
    return r**a, power(f, a)


def _least_frugal_exponent(f: Factorization, k: int, B: int) -> int:
    # h(r^a) grows without bound for any r >= 2, though slowly when r < B
    if not f:
        raise ValueError("powers of 1 never become frugal")
    a = 2
    while _h(power(f, a), B) < k:
        a += 1
    return a


# -- extravagant numbers ---------------------------------------------------


def _iroot_floor(x: int, n: int) -> int:
    """floor(x ** (1/n)) for x >= 0."""
    if x < 2:
        return x
    y = 1 << -(-x.bit_length() // n)
    while True:
        z = ((n - 1) * y + x // y ** (n - 1)) // n
        if z >= y:
            break
        y = z
    while y**n > x:
        y -= 1
    while (y + 1) ** n <= x:
        y += 1
    return y


def extravagant_t(k: int, B: int = 10) -> int:
    """Least t with B^(t(1-theta)) > 2^theta (k+2)^2, compared exactly."""
    num, den = THETA.numerator, THETA.denominator
    # raise both sides to the power den
    rhs = 2**num * (k + 2) ** (2 * den)
    t = 1
    while B ** (t * (den - num)) <= rhs:
        t += 1
    return t


def _step_bounds(t: int, B: int, digits: int = 60) -> tuple[Fraction, Fraction]:
    """Rational lower/upper bounds on L - 1 = 2^theta / B^(t(1-theta))."""
    num, den = THETA.numerator, THETA.denominator
    scale = 10**digits
    # (L-1)^den = 2^num / B^(t(den-num)); take a den-th root at fixed precision
    x = (2**num * scale**den) // B ** (t * (den - num))
    low = _iroot_floor(x, den)
    return Fraction(low, scale), Fraction(low + 1, scale)


def extravagant_intervals(k: int, B: int = 10, t: int | None = None) -> list[tuple[int, int]]:
    """Integer intervals [B^t L^i, B^t L^(i+1)], i = 0..k, rounded inward."""
    if t is None:
        t = extravagant_t(k, B)
    step_lo, step_hi = _step_bounds(t, B)
    bt = B**t
    out = []
    for i in range(k + 1):
        # lower endpoint rounded up from an over-estimate, upper rounded down from an under-estimate
        left = bt * (1 + step_hi) ** i
        right = bt * (1 + step_lo) ** (i + 1)
        lo = -((-left.numerator) // left.denominator)
        hi = right.numerator // right.denominator
        out.append((lo, hi))
    return out


def build_extravagant(k: int, B: int = 10, max_retries: int = 8) -> tuple[int, Factorization]:
    """A product of k+1 primes of equal length t+1 with h(n) = -k exactly."""
    check_base(B)
    if k < 1:
        raise ValueError("k must be >= 1")
    t = extravagant_t(k, B)
    for _ in range(max_retries):
        primes = []
        for lo, hi in extravagant_intervals(k, B, t):
            after = primes[-1] if primes else lo - 1
            p = next_prime_in(max(lo - 1, after), hi) if max(lo - 1, after) < hi else None
            if p is None:
                break
            primes.append(p)
        else:
            f = [(p, 1) for p in primes]
            n = multiply_out(f)
            if _h(f, B) == -k and all(delta(p, B) == t + 1 for p in primes):
                return n, f
        t += 1
    raise RuntimeError(f"no extravagant witness for k={k}, base {B} after {max_retries} attempts")


# -- CRT -------------------------------------------------------------------


def crt(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    """Solve x = r_i (mod m_i); moduli need not be coprime.

    Returns (x, lcm) with 0 <= x < lcm.  Raises ValueError on an
    inconsistent system.
    """
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        if n < 1:
            raise ValueError(f"modulus must be positive, got {n}")
        g = gcd(m, n)
        diff = r - x
        if diff % g:
            raise ValueError(f"inconsistent congruences modulo {m} and {n}")
        # x + m * u = r (mod n)  ->  u = (diff/g) * inv(m/g) (mod n/g)
        n_g = n // g
        u = (diff // g) * pow(m // g, -1, n_g) % n_g if n_g > 1 else 0
        x += m * u
        m *= n_g
        x %= m
    return x, m


# -- run plans -------------------------------------------------------------


@dataclass
class ConstructionPlan:
    t: int
    k: int
    base: int
    variant: Variant
    f0: int
    offsets: list[int]
    f: dict[int, int]
    m: dict[int, int]
    m_factors: dict[int, Factorization]
    M: int
    N0: int
    cofactor_forms: dict[int, tuple[int, int]] = field(default_factory=dict)

    def modulus(self, j: int) -> int:
        return self.f[j] * self.m[j]

    def known_factors(self, j: int) -> Factorization:
        return merge(factor_u64(self.f[j]), self.m_factors[j])

    def to_json(self) -> dict:
        s = str
        return {
            "t": self.t,
            "k": self.k,
            "base": self.base,
            "variant": self.variant.value,
            "f0": s(self.f0),
            "offsets": self.offsets,
            "f": {s(j): s(v) for j, v in self.f.items()},
            "m": {s(j): s(v) for j, v in self.m.items()},
            "m_factors": {s(j): [[s(p), e] for p, e in v] for j, v in self.m_factors.items()},
            "M": s(self.M),
            "N0": s(self.N0),
            "cofactor_forms": {s(j): [s(S), s(Mj)] for j, (S, Mj) in self.cofactor_forms.items()},
        }

    @classmethod
    def from_json(cls, d: dict | str) -> ConstructionPlan:
        if isinstance(d, str):
            d = json.loads(d)
        return cls(
            t=d["t"],
            k=d["k"],
            base=d["base"],
            variant=Variant(d["variant"]),
            f0=int(d["f0"]),
            offsets=[int(j) for j in d["offsets"]],
            f={int(j): int(v) for j, v in d["f"].items()},
            m={int(j): int(v) for j, v in d["m"].items()},
            m_factors={int(j): [(int(p), e) for p, e in v] for j, v in d["m_factors"].items()},
            M=int(d["M"]),
            N0=int(d["N0"]),
            cofactor_forms={int(j): (int(S), int(Mj)) for j, (S, Mj) in d["cofactor_forms"].items()},
        )


def forced_moduli(t: int) -> tuple[int, dict[int, int]]:
    """f0 = prod p^(a+1) over primes p < t with p^a the largest power below t,
    and f_j = product of the exact powers of those primes dividing j."""
    primes = [p for p in range(2, t) if is_prime(p)]
    f0 = 1
    for p in primes:
        q = p
        while q * p < t:
            q *= p
        f0 *= q * p
    fj = {}
    for j in range(1, t):
        v = 1
        for p in primes:
            x = j
            while x % p == 0:
                x //= p
                v *= p
        fj[j] = v
    return f0, fj


def _parse_overrides(overrides) -> dict[int, Factorization]:
    out = {}
    for j, v in (overrides or {}).items():
        if isinstance(v, int):
            v = factor_u64(v) if v < U64 else [(v, 1)]
        out[int(j)] = sorted((int(p), int(e)) for p, e in v)
    return out


def build_plan(
    t: int,
    k: int = 0,
    B: int = 10,
    variant: Variant | str = Variant.BASELINE,
    overrides: dict[int, Factorization | int] | None = None,
) -> ConstructionPlan:
    """Moduli, multipliers and CRT solution for t consecutive k-frugal numbers.

    ``overrides`` maps an offset to an explicit multiplier (as an int or a
    factorization); the remaining multipliers follow the default rule: for
    each offset in increasing order take the next unused prime q, starting
    with the least prime >= t, and the least exponent a >= 2 making f_j q^a
    (k+1)-frugal.  For t = 7 in base 10 this yields exactly the multipliers
    7^6, 11^4, 13^4, 17^4, 19^3, 23^4 (and 1800, 7^4, 11^4, 13^4, 17^3, 19^4
    for the power_m0 variant).
    """
    check_base(B)
    variant = Variant(variant)
    if t < 2:
        raise ValueError("run length t must be >= 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    f0, fj = forced_moduli(t)
    if variant is Variant.POWER_M0 and f0 < 2:
        raise ValueError("power_m0 needs t >= 3 so that f0 > 1")
    if variant is Variant.SHIFTED:
        offsets = list(range(-1, t - 1))
    else:
        offsets = list(range(t))
    f = {j: (f0 if j == 0 else 1 if j == -1 else fj[j]) for j in offsets}
    fixed = _parse_overrides(overrides)
    unknown = set(fixed) - set(offsets)
    if unknown:
        raise ValueError(f"overrides for uncovered offsets {sorted(unknown)}")

    small = set(p for p, _ in factor_u64(f0)) if f0 > 1 else set()
    used = set(small)
    for fac in fixed.values():
        used |= {p for p, _ in fac}
    # multiplier primes start above every prime below t, so a prime t is itself
    # used; otherwise t would divide one of the t cofactors for every x
    q = max(small, default=1)
    m_factors: dict[int, Factorization] = {}
    for j in offsets:
        need = k + 1
        fac_j = factor_u64(f[j]) if f[j] > 1 else []
        if j in fixed:
            m_factors[j] = fixed[j]
        elif j == 0 and variant is Variant.POWER_M0:
            # N is forced divisible by f0^a, so m0 = f0^(a-1)
            a = _least_frugal_exponent(fac_j, need, B)
            m_factors[j] = power(fac_j, a - 1)
        elif f[j] > 1 and _h(fac_j, B) >= need:
            m_factors[j] = []
        elif f[j] == 1 and k == 0:
            # a prime N + j is already equidigital
            m_factors[j] = []
        else:
            q = _next_prime_after(q)
            while q in used:
                q = _next_prime_after(q)
            a = 2
            while _h(merge(fac_j, [(q, a)]), B) < need:
                a += 1
            m_factors[j] = [(q, a)]
            used.add(q)

    m = {j: multiply_out(m_factors[j]) for j in offsets}
    # soundness: every nontrivial modulus is (k+1)-frugal and the multipliers are coprime
    for j in offsets:
        mod_f = merge(factor_u64(f[j]) if f[j] > 1 else [], m_factors[j])
        if multiply_out(mod_f) > 1 and _h(mod_f, B) < k + 1:
            raise ValueError(f"offset {j}: f_j*m_j = {multiply_out(mod_f)} is not {k + 1}-frugal")
    for i, a in enumerate(offsets):
        if variant is not Variant.POWER_M0 or a != 0:
            if gcd(m[a], f0) != 1:
                raise ValueError(f"m_{a} = {m[a]} shares a factor with f0 = {f0}")
        for b in offsets[i + 1 :]:
            if gcd(m[a], m[b]) != 1:
                raise ValueError(f"m_{a} and m_{b} are not coprime")

    moduli = [f[j] * m[j] for j in offsets]
    N0, M = crt([-j for j in offsets], moduli)
    forms = {j: ((N0 + j) // (f[j] * m[j]), M // (f[j] * m[j])) for j in offsets}
    return ConstructionPlan(t, k, B, variant, f0, offsets, f, m, m_factors, M, N0, forms)


# -- simultaneous prime search ----------------------------------------------

SEARCH_SIEVE_LIMIT = 2000
_SEARCH_BLOCK = 1 << 16


def is_admissible(plan: ConstructionPlan, limit: int = SEARCH_SIEVE_LIMIT) -> bool:
    """False if some prime q <= limit divides the product of the forms for every x."""
    for q in base_primes(limit).tolist():
        bad = set()
        for S, Mj in plan.cofactor_forms.values():
            if Mj % q == 0:
                if S % q == 0:
                    bad = set(range(q))
                    break
            else:
                bad.add(-S * pow(Mj, -1, q) % q)
        if len(bad) == q:
            return False
    return True


def _search_block(forms: list[tuple[int, int]], sieve: list[tuple[int, list[int]]], x0: int, x1: int) -> int | None:
    alive = np.ones(x1 - x0, dtype=bool)
    for q, roots in sieve:
        for r in roots:
            alive[(r - x0) % q :: q] = False
    for i in np.flatnonzero(alive).tolist():
        x = x0 + i
        if all(is_probable_prime(S + Mj * x) for S, Mj in forms):
            return x
    return None


def dickson_search(
    plan: ConstructionPlan,
    x_start: int = 0,
    x_limit: int = 10**6,
    workers: int = 1,
    block: int = _SEARCH_BLOCK,
) -> tuple[int, int] | None:
    """Least x in [x_start, x_limit) making every cofactor S_j + M_j x a probable prime.

    Returns (x, N) with N = N0 + M x, or None if the range is exhausted.
    """
    if x_limit <= x_start:
        return None
    forms = sorted(plan.cofactor_forms.values(), key=lambda sm: sm[1])
    # forms small enough to equal a sieving prime are tested directly
    safe = x_start
    for S, Mj in forms:
        if S + Mj * safe <= SEARCH_SIEVE_LIMIT:
            safe = max(safe, (SEARCH_SIEVE_LIMIT - S) // Mj + 1)
    for x in range(x_start, min(safe, x_limit)):
        if all(is_probable_prime(S + Mj * x) for S, Mj in forms):
            return x, plan.N0 + plan.M * x
    lo = max(safe, x_start)
    if lo >= x_limit:
        return None

    sieve = []
    for q in base_primes(SEARCH_SIEVE_LIMIT).tolist():
        roots = set()
        for S, Mj in forms:
            if Mj % q:
                roots.add(-S * pow(Mj, -1, q) % q)
            elif S % q == 0:
                # q divides this form for every x beyond the direct range
                return None
        sieve.append((q, sorted(roots)))

    blocks = [(a, min(a + block, x_limit)) for a in range(lo, x_limit, block)]
    run = lambda b: _search_block(forms, sieve, *b)
    if workers <= 1:
        for b in blocks:
            x = run(b)
            if x is not None:
                return x, plan.N0 + plan.M * x
        return None
    it = iter(blocks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            chunk = list(islice(it, workers))
            if not chunk:
                return None
            hits = [x for x in pool.map(run, chunk) if x is not None]
            if hits:
                x = min(hits)
                return x, plan.N0 + plan.M * x


# -- verification ------------------------------------------------------------


def _report(n: int, known: Factorization, cofactor: int, B: int, rho_iterations: int) -> EconomyReport:
    fac, unresolved = factor_partial(cofactor, rho_iterations)
    return classify(n, B, merge(known, fac), exact=not unresolved)


def verify_run(
    plan: ConstructionPlan,
    N: int,
    offsets: list[int] | None = None,
    rho_iterations: int = 1 << 22,
) -> list[EconomyReport]:
    """Reports for N + j over the plan's offsets (or the given ones).

    Covered offsets use the known factorization of f_j * m_j and factor only
    the cofactor.  Other offsets are factored from scratch.  Cofactors that
    stay composite after a bounded rho attempt give reports with
    ``exact=False``, whose h is only an upper bound.
    """
    if (N - plan.N0) % plan.M:
        raise ValueError("N is not congruent to N0 modulo M")
    out = []
    for j in offsets if offsets is not None else plan.offsets:
        n = N + j
        if n < 1:
            raise ValueError(f"N + {j} is not positive")
        if j in plan.f:
            mod = plan.modulus(j)
            out.append(_report(n, plan.known_factors(j), n // mod, plan.base, rho_iterations))
        else:
            out.append(_report(n, [], n, plan.base, rho_iterations))
    return out


def verify_run_u64(start: int, length: int, B: int = 10) -> list[EconomyReport]:
    """Independent check of start .. start+length-1 by full 64-bit factorization."""
    if start < 1 or start + length > U64:
        raise ValueError("verify_run_u64 needs 1 <= start and start + length <= 2^64")
    return [classify(n, B) for n in range(start, start + length)]
