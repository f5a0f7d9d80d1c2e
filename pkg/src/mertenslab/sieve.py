"""Deterministic prime and Mobius computation.

Full-range tables (`primes_up_to`, `spf_table`) for small limits and
segmented block production (`mu_block`) for large limits.  Blocks are
pure functions of their range, so distinct blocks may be computed
concurrently; `PrimeTable` is immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import CapacityError

# Memory budgets.  Full-range tables allocate O(limit) and are reserved
# for small limits; the segmented path is the large-limit route.
DEFAULT_SIEVE_BUDGET = 10**8
# Cap on the span a single mu_block call may materialize (~11 bytes/n).
DEFAULT_SEGMENT_CAP = 1 << 24
# Default block length used by streaming callers: balances cache
# locality against the re-scan cost of base primes.
DEFAULT_BLOCK_LENGTH = 1 << 20


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to `limit`, ascending."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.primes.size)


@dataclass(frozen=True)
class SpfTable:
    """Smallest prime factor of every 2 <= n <= limit.

    `spf[n]` indexes directly; `spf[0] == 0` and `spf[1] == 1` are
    sentinels outside the map's domain.
    """

    limit: int
    spf: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class MoebiusBlock:
    """Mobius values for the contiguous range [lo, hi].

    `values[n - lo]` is mu(n), one signed byte per integer.
    """

    lo: int
    hi: int
    values: np.ndarray = field(repr=False)

    def mu(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside block [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])


def primes_up_to(limit: int, *, budget: int = DEFAULT_SIEVE_BUDGET) -> PrimeTable:
    """Eratosthenes sieve returning exactly the primes <= limit.

    Parameters
    ----------
    limit : int
        Upper bound (inclusive), >= 0.
    budget : int
        Memory budget; limits beyond it raise CapacityError.
    """
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    if limit > budget:
        raise CapacityError(f"sieve limit {limit} exceeds budget {budget}")
    if limit < 2:
        return PrimeTable(limit, np.empty(0, dtype=np.int64))
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return PrimeTable(limit, np.flatnonzero(is_prime).astype(np.int64))


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> PrimeTable:
    return primes_up_to(limit)


def spf_table(limit: int, *, budget: int = DEFAULT_SIEVE_BUDGET) -> SpfTable:
    """Smallest-prime-factor table for 2 <= n <= limit.

    Reserved for small limits (the array costs 4 bytes per integer);
    use `mu_block` for anything past the budget.
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if limit > budget:
        raise CapacityError(f"spf limit {limit} exceeds budget {budget}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return SpfTable(limit, spf)


def mu_of(n: int) -> int:
    """Mobius function of a single integer.

    0 if some k^2 > 1 divides n, otherwise (-1)^(distinct prime factors).
    Trial division; fine up to ~10^12.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    count = 0
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            count += 1
        p += 1 if p == 2 else 2
    if m > 1:
        count += 1
    return -1 if count & 1 else 1


def mu_block(
    lo: int,
    hi: int,
    *,
    primes: PrimeTable | None = None,
    segment_cap: int = DEFAULT_SEGMENT_CAP,
) -> MoebiusBlock:
    """Segmented Mobius values over [lo, hi].

    For each base prime p <= sqrt(hi): count p once toward the distinct
    divisor count, flag multiples of p^2 as zeros, and divide every
    p-power out of the running cofactor.  A residual cofactor > 1 after
    all base primes is a single prime > sqrt(hi) and counts once more.
    The result is independent of how a range is partitioned into blocks.

    Parameters
    ----------
    lo, hi : int
        Inclusive range, 1 <= lo <= hi.
    primes : PrimeTable, optional
        Base primes covering sqrt(hi); computed (and cached) if omitted.
    segment_cap : int
        Maximum span a single call may materialize.
    """
    if lo < 1 or hi < lo:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    span = hi - lo + 1
    if span > segment_cap:
        raise CapacityError(f"block span {span} exceeds segment cap {segment_cap}")
    root = isqrt(hi)
    if primes is None:
        primes = _cached_primes(root)
    elif primes.limit < root:
        raise ValueError(f"base primes up to {primes.limit} < sqrt({hi})")

    cofactor = np.arange(lo, hi + 1, dtype=np.int64)
    distinct = np.zeros(span, dtype=np.uint8)
    squared = np.zeros(span, dtype=bool)

    for p in primes.primes:
        p = int(p)
        if p > root:
            break
        start = -lo % p
        distinct[start::p] += 1
        pk = p
        while pk <= hi:
            cofactor[-lo % pk :: pk] //= p
            pk *= p
        p2 = p * p
        if p2 <= hi:
            squared[-lo % p2 :: p2] = True

    distinct += cofactor > 1
    mu = np.where(distinct & 1, -1, 1).astype(np.int8)
    mu[squared] = 0
    return MoebiusBlock(lo, hi, mu)
