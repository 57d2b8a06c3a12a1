"""Base-B digit lengths using integer arithmetic only.

``delta(n, B)`` is the number of base-B digits of ``n``; ``delta_prime`` is the
cost of writing an exponent (an exponent of 1 is not written at all).
"""
from bisect import bisect_right

import numpy as np

MIN_BASE = 2
MAX_BASE = 64

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ-_"

_WORD = 1 << 64
_POWER_TABLES: dict[int, list[int]] = {}


def check_base(B: int) -> int:
    if not isinstance(B, int) or isinstance(B, bool):
        raise TypeError(f"base must be an int, got {type(B).__name__}")
    if not MIN_BASE <= B <= MAX_BASE:
        raise ValueError(f"base must be in [{MIN_BASE}, {MAX_BASE}], got {B}")
    return B


def powers_of(B: int) -> list[int]:
    """B, B^2, ... up to the first power >= 2^64 (cached per base)."""
    table = _POWER_TABLES.get(B)
    if table is None:
        table = []
        x = B
        while True:
            table.append(x)
            if x >= _WORD:
                break
            x *= B
        _POWER_TABLES[B] = table
    return table


def delta_loop(n: int, B: int = 10) -> int:
    """Digit length by repeated division; the reference definition."""
    if n < 1:
        raise ValueError(f"digit length is defined for n >= 1, got {n}")
    k = 1
    while n >= B:
        n //= B
        k += 1
    return k


def delta(n: int, B: int = 10) -> int:
    """Return the unique k with B**(k-1) <= n < B**k."""
    check_base(B)
    if n < 1:
        raise ValueError(f"digit length is defined for n >= 1, got {n}")
    if n < _WORD:
        return bisect_right(powers_of(B), n) + 1
    # big n: strip whole word-sized chunks first, then finish with the table
    table = powers_of(B)
    chunk = len(table) - 1
    big = table[chunk - 1]
    k = 0
    while n >= _WORD:
        n //= big
        k += chunk
    return k + bisect_right(table, n) + 1


def delta_prime(a: int, B: int = 10) -> int:
    """Digits needed for an exponent: 0 for a == 1, else delta(a)."""
    if a < 1:
        raise ValueError(f"exponents are >= 1, got {a}")
    return 0 if a == 1 else delta(a, B)


def delta_array(values: np.ndarray, B: int = 10) -> np.ndarray:
    """Vectorized delta for positive integers below 2^63."""
    table = np.array([p for p in powers_of(B) if p < (1 << 63)], dtype=np.int64)
    return np.searchsorted(table, values, side="right").astype(np.int16) + 1


def digit_string(n: int, B: int = 10) -> str:
    """Debugging aid: the base-B representation of n >= 0."""
    check_base(B)
    if n == 0:
        return "0"
    out = []
    while n:
        n, r = divmod(n, B)
        out.append(ALPHABET[r])
    return "".join(reversed(out))
