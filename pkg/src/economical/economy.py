"""phi, h and the economy class of an integer in base B."""
from dataclasses import dataclass, field
from enum import Enum

from .digits import check_base, delta, delta_prime
from .factor import U64, Factorization, factor_u64, multiply_out


class EconomyClass(str, Enum):
    EXTRAVAGANT = "extravagant"
    EQUIDIGITAL = "equidigital"
    FRUGAL = "frugal"

    @classmethod
    def of(cls, h: int) -> "EconomyClass":
        if h < 0:
            return cls.EXTRAVAGANT
        return cls.EQUIDIGITAL if h == 0 else cls.FRUGAL


@dataclass(frozen=True)
class EconomyReport:
    n: int
    base: int
    delta: int
    phi: int
    h: int
    cls: EconomyClass
    factorization: Factorization = field(repr=False)
    # False when some factor in the factorization is an unsplit composite;
    # h is then only an upper bound on the true value
    exact: bool = True

    @property
    def economical(self) -> bool:
        return self.h >= 0

    def is_k_frugal(self, k: int) -> bool:
        return self.h >= k

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "base": self.base,
            "delta": self.delta,
            "phi": self.phi,
            "h": self.h,
            "class": self.cls.value,
            "economical": self.economical,
            "exact": self.exact,
            "factorization": [[str(p), e] for p, e in self.factorization],
        }


def phi(f: Factorization, B: int = 10) -> int:
    """Digits needed to write the prime power factorization f."""
    return sum(delta(p, B) + delta_prime(a, B) for p, a in f)


def h(n: int, B: int = 10, factorization: Factorization | None = None) -> int:
    """delta(n) - phi(n).  Without an explicit factorization n must be < 2^64."""
    if factorization is None:
        factorization = factor_u64(n)
    return delta(n, B) - phi(factorization, B)


def classify(
    n: int,
    B: int = 10,
    factorization: Factorization | None = None,
    exact: bool = True,
) -> EconomyReport:
    check_base(B)
    if n < 1:
        raise ValueError(f"classify needs n >= 1, got {n}")
    if factorization is None:
        if n >= U64:
            raise ValueError("n >= 2^64 needs an explicit factorization")
        factorization = factor_u64(n)
    elif multiply_out(factorization) != n:
        raise ValueError(f"factorization does not multiply out to {n}")
    d = delta(n, B)
    ph = phi(factorization, B)
    return EconomyReport(n, B, d, ph, d - ph, EconomyClass.of(d - ph), list(factorization), exact)
