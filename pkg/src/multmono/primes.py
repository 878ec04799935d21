"""Sieve-based prime and multiplicative-function tables.

Everything here is exact integer arithmetic; the sieves are the shared
substrate for the rest of the package (deterministic, no probabilistic
primality anywhere).
"""

from __future__ import annotations

import math
from heapq import heappop, heappush
from typing import Iterator

import numpy as np


def prime_sieve(nmax: int) -> np.ndarray:
    """Boolean array of length nmax+1 with is_prime[n] = True iff n prime."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    is_prime = np.ones(nmax + 1, dtype=bool)
    is_prime[: min(2, nmax + 1)] = False
    for i in range(2, math.isqrt(nmax) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return is_prime


def primes_upto(nmax: int) -> list[int]:
    """Sorted list of primes <= nmax."""
    if nmax < 2:
        return []
    return [int(p) for p in np.nonzero(prime_sieve(nmax))[0]]


def mobius_upto(nmax: int) -> np.ndarray:
    """int8 array with mu[n] for n = 0..nmax (mu[0] = 0 by convention)."""
    mu = np.ones(nmax + 1, dtype=np.int8)
    if nmax >= 0:
        mu[0] = 0
    for p in primes_upto(math.isqrt(nmax)):
        mu[p * p :: p * p] = 0
    # sign flips: one per prime divisor; done by a full sieve pass
    is_prime = prime_sieve(nmax)
    for p in np.nonzero(is_prime)[0]:
        mu[p::p] *= -1
    return mu


def mobius(n: int) -> int:
    """mu(n) by trial factorization; n >= 1 required."""
    if n < 1:
        raise ValueError("mobius is defined on positive integers")
    result = 1
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            result = -result
        d += 1 if d == 2 else 2
    if m > 1:
        result = -result
    return result


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as (p, exponent) pairs, p ascending."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def smallest_prime_factor_upto(nmax: int) -> np.ndarray:
    """int64 array spf with spf[n] = least prime factor of n (spf[1] = 1)."""
    spf = np.arange(nmax + 1, dtype=np.int64)
    for i in range(2, math.isqrt(nmax) + 1):
        if spf[i] == i:
            sl = spf[i * i :: i]
            sl[sl == np.arange(i * i, nmax + 1, i)] = i
    return spf


def largest_prime_factor_upto(nmax: int) -> np.ndarray:
    """int64 array lpf with lpf[n] = greatest prime factor of n (lpf[1] = 1)."""
    lpf = np.ones(nmax + 1, dtype=np.int64)
    is_prime = prime_sieve(nmax)
    for p in np.nonzero(is_prime)[0]:
        lpf[p::p] = p
    return lpf


def omega_upto(nmax: int) -> np.ndarray:
    """int16 array with the number of distinct prime divisors of each n."""
    w = np.zeros(nmax + 1, dtype=np.int16)
    is_prime = prime_sieve(nmax)
    for p in np.nonzero(is_prime)[0]:
        w[p::p] += 1
    return w


def smooth_ascending(y: float) -> Iterator[int]:
    """Yield the y-friable integers in increasing order, starting at 1.

    Generation is canonical (nondecreasing prime index), so every member
    appears exactly once.  The stream is infinite for y >= 2.
    """
    plist = primes_upto(int(y))
    heap: list[tuple[int, int]] = [(1, 0)]
    while heap:
        a, i = heappop(heap)
        yield a
        for j in range(i, len(plist)):
            heappush(heap, (a * plist[j], j))
