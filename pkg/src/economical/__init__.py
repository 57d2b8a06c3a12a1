"""Digit economy of integers: how many base-B digits a prime power
factorization needs compared with the number itself."""
from .digits import delta, delta_prime
from .economy import EconomyClass, EconomyReport, classify, h, phi
from .factor import factor_u64, is_prime, is_probable_prime, next_prime_in

__all__ = [
    "EconomyClass",
    "EconomyReport",
    "classify",
    "delta",
    "delta_prime",
    "factor_u64",
    "h",
    "is_prime",
    "is_probable_prime",
    "next_prime_in",
    "phi",
]
