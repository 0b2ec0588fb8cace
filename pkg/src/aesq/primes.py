"""Prime generation, factorization and the rough-number indicator.

All routines are pure and the returned containers are immutable, so results
can be shared freely across threads.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError

#: Hard cap on the upper endpoint of a sieved interval.
SIEVE_BOUND = 10**12

#: Segment size (number of odd entries per segment) for interval sieving.
SEGMENT_ODD = 1 << 18

#: Largest m for which a smallest-prime-factor table is built.  Beyond this
#: bound factorization falls back to trial division by sieved primes.
SPF_BOUND = 10**7

_spf_table: np.ndarray | None = None
_spf_limit = 0


@dataclass(frozen=True)
class PrimeInterval:
    """Ascending primes in the half-open interval (lo, hi]."""

    lo: int
    hi: int
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class Factorization:
    """Complete prime factorization of m, ascending by prime."""

    m: int
    factors: tuple[tuple[int, int], ...]

    @property
    def distinct_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def smallest_prime_factor(self) -> int | None:
        return self.factors[0][0] if self.factors else None


@lru_cache(maxsize=64)
def primes_upto(n: int) -> tuple[int, ...]:
    """All primes <= n by a plain sieve of Eratosthenes."""
    if n < 2:
        return ()
    if n > 10**9:
        raise CapacityError(f"primes_upto({n}) exceeds the dense-sieve bound 10^9")
    is_comp = np.zeros(n + 1, dtype=bool)
    is_comp[:2] = True
    for p in range(2, math.isqrt(n) + 1):
        if not is_comp[p]:
            is_comp[p * p :: p] = True
    return tuple(int(p) for p in np.flatnonzero(~is_comp))


def _sieve_segment(lo: int, hi: int, base: tuple[int, ...]) -> list[int]:
    """Primes in [lo, hi] given base primes covering sqrt(hi)."""
    size = hi - lo + 1
    flags = np.ones(size, dtype=bool)
    for p in base:
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        flags[start - lo :: p] = False
    if lo <= 1:
        flags[: min(size, 2 - lo)] = False
    return [int(lo + i) for i in np.flatnonzero(flags)]


def primes_in(lo: int, hi: int) -> PrimeInterval:
    """Exactly the primes in (lo, hi], sieved segment by segment."""
    if not (1 <= lo < hi):
        raise DomainError(f"require 1 <= lo < hi, got lo={lo}, hi={hi}")
    if hi > SIEVE_BOUND:
        raise CapacityError(f"hi={hi} exceeds the sieve bound {SIEVE_BOUND}")
    base = primes_upto(math.isqrt(hi) + 1)
    out: list[int] = []
    seg = 2 * SEGMENT_ODD
    start = lo + 1
    while start <= hi:
        end = min(start + seg - 1, hi)
        out.extend(_sieve_segment(start, end, base))
        start = end + 1
    return PrimeInterval(lo=lo, hi=hi, primes=tuple(out))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _as_integer(m) -> int | None:
    """Exact integer value of m, or None if m is not an integer."""
    if isinstance(m, bool):
        return None
    if isinstance(m, numbers.Integral):
        return int(m)
    if isinstance(m, Fraction):
        return int(m) if m.denominator == 1 else None
    if isinstance(m, float):
        return int(m) if m.is_integer() else None
    if isinstance(m, numbers.Rational):
        return int(m.numerator) if m.denominator == 1 else None
    return None


def psi(m, z) -> int:
    """Rough-number indicator: 1 iff m is a positive integer with no prime
    factor below z.  Non-integers map to 0 by convention."""
    if z < 2:
        raise DomainError(f"require z >= 2, got z={z}")
    n = _as_integer(m)
    if n is None or n < 1:
        return 0
    if n == 1:
        return 1
    for p in primes_upto(_ceil_excl(z)):
        if p > n:
            break
        if n % p == 0:
            return 0
    return 1


def _ceil_excl(z) -> int:
    """Largest integer below z, i.e. p < z  <=>  p <= _ceil_excl(z)."""
    return int(math.ceil(z)) - 1


def _spf(limit: int) -> np.ndarray:
    """Smallest-prime-factor table up to limit (grown lazily, cached)."""
    global _spf_table, _spf_limit
    if _spf_table is None or _spf_limit < limit:
        n = max(limit, 10**5)
        spf = np.zeros(n + 1, dtype=np.int64)
        for p in range(2, math.isqrt(n) + 1):
            if spf[p] == 0:
                sl = spf[p * p :: p]
                sl[sl == 0] = p
                spf[p] = p
        rest = np.flatnonzero(spf[2:] == 0) + 2
        spf[rest] = rest
        _spf_table, _spf_limit = spf, n
    return _spf_table


def factorize(m: int) -> Factorization:
    """Complete prime factorization; empty factor list for m = 1."""
    if m < 1:
        raise DomainError(f"require m >= 1, got {m}")
    if m > SIEVE_BOUND:
        raise CapacityError(f"m={m} exceeds the factorization bound {SIEVE_BOUND}")
    n = m
    factors: list[tuple[int, int]] = []
    if m <= SPF_BOUND:
        spf = _spf(m)
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    else:
        for p in primes_upto(math.isqrt(m)):
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                factors.append((p, e))
        if n > 1:
            factors.append((n, 1))
    return Factorization(m=m, factors=tuple(factors))
