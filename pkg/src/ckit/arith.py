"""Shared elementary number theory: sieves, factorization, residue symbols."""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

import numpy as np


@lru_cache(maxsize=8)
def spf_table(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 1)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[:2] = 1
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            spf[p * p :: p][spf[p * p :: p] == 0] = p
            spf[p] = p
    spf[spf == 0] = np.arange(limit + 1)[spf == 0]
    return spf


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    spf = spf_table(limit)
    idx = np.arange(limit + 1)
    return [int(p) for p in idx[2:][spf[2:] == idx[2:]]]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    fac: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            while n % q == 0:
                fac[q] = fac.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def squarefree_part(n: int) -> int:
    """The square-free integer s with n = s * (square), preserving sign."""
    if n == 0:
        raise ValueError("0 has no square-free part")
    s = -1 if n < 0 else 1
    for p, e in factorize(n).items():
        if e % 2:
            s *= p
    return s


def squarefree_sieve(limit: int) -> np.ndarray:
    """Boolean array sf[0..limit], sf[n] true iff n is square-free (sf[0]=False)."""
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    for d in range(2, isqrt(limit) + 1):
        sf[d * d :: d * d] = False
    return sf


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi symbol needs odd positive n")
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


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    return result * jacobi(a, n)


def legendre_bit(a: int, p: int) -> int:
    """Additive Legendre/Kronecker symbol: 0 if (a/p)=1, 1 if (a/p)=-1."""
    s = kronecker(a, p)
    if s == 0:
        raise ValueError(f"{a} not coprime to {p}")
    return (1 - s) // 2


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def crt(r1: int, m1: int, r2: int, m2: int) -> int:
    """x mod m1*m2 with x = r1 mod m1, x = r2 mod m2 (m1, m2 coprime)."""
    g, u, _ = xgcd(m1, m2)
    if g != 1:
        raise ValueError("moduli not coprime")
    return (r1 + (r2 - r1) * u % m2 * m1) % (m1 * m2)
