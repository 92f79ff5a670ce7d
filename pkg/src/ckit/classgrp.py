"""Imaginary quadratic class groups via reduced binary forms, and genus invariants.

For positive square-free n the field Q(sqrt(-n)) has discriminant D = -n or
-4n; h counts the primitive reduced forms of discriminant D, and with t the
number of primes dividing D genus theory gives g(n) = h / 2^(t-1) = #2Cl.
The Redei matrix of additive residue symbols between the prime-discriminant
factors of D computes the 4-rank without composing a single form; Gauss
composition is kept as the independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .arith import factorize, is_squarefree, kronecker, legendre_bit, xgcd
from .gf2 import gf2_rank


@dataclass(frozen=True)
class ClassGroupData:
    n: int
    D: int
    h: int
    t: int
    g: int
    four_rank: int


def field_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt(-n)): -n if n = 3 mod 4, else -4n."""
    if n <= 0 or not is_squarefree(n):
        raise ValueError("n must be positive square-free")
    return -n if n % 4 == 3 else -4 * n


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """All primitive reduced forms (a, b, c) of negative discriminant D."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"invalid negative discriminant {D}")
    forms = []
    b = D % 2
    while 3 * b * b <= -D:
        fourac = b * b - D
        a = max(b, 1)
        while 4 * a * a <= fourac:
            if fourac % (4 * a) == 0:
                c = fourac // (4 * a)
                if gcd(gcd(a, b), c) == 1:
                    forms.append((a, b, c))
                    if b and b != a and a != c:
                        forms.append((a, -b, c))
            a += 1
        b += 2
    return sorted(forms)


def _reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if -a < b <= a <= c:
            if a == c and b < 0:
                b = -b
            return (a, b, c)
        if a > c:
            a, b, c = c, -b, a
            continue
        # normalize b into (-a, a]
        r = (a - b) // (2 * a)
        b2 = b + 2 * r * a
        a, b, c = a, b2, a * r * r + b * r + c
        if not (-a < b <= a):
            continue
        if a <= c:
            if a == c and b < 0:
                b = -b
            return (a, b, c)


def _form_represents_coprime(f: tuple[int, int, int], coprime_to: int) -> tuple[int, int, int]:
    """Small (x, y) with gcd(f(x, y), coprime_to) = 1, returning (value, x, y)."""
    a, b, c = f
    for bound in range(1, 20):
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                val = a * x * x + b * x * y + c * y * y
                if val != 0 and gcd(val, coprime_to) == 1 and gcd(x, y) == 1:
                    return val, x, y
    raise ArithmeticError("no coprime representation found")


def _transform_to_leading(f: tuple[int, int, int], x: int, y: int) -> tuple[int, int, int]:
    """Equivalent form whose leading coefficient is f(x, y), via an SL2 completion."""
    a, b, c = f
    g, u, v = xgcd(x, y)
    assert g == 1
    # matrix [[x, -v], [y, u]] has determinant 1
    a2 = a * x * x + b * x * y + c * y * y
    b2 = 2 * a * x * (-v) + b * (x * u - v * y) + 2 * c * y * u
    c2 = a * v * v - b * v * u + c * u * u
    assert b2 * b2 - 4 * a2 * c2 == b * b - 4 * a * c
    return (a2, b2, c2)


def compose(f: tuple[int, int, int], g: tuple[int, int, int]) -> tuple[int, int, int]:
    """Gauss composition of two forms of the same discriminant, reduced output."""
    D = f[1] ** 2 - 4 * f[0] * f[2]
    assert g[1] ** 2 - 4 * g[0] * g[2] == D
    _, x, y = _form_represents_coprime(g, 2 * f[0])
    g2 = _transform_to_leading(g, x, y)
    a1, b1 = f[0], f[1]
    a2, b2 = g2[0], g2[1]
    assert gcd(a1, a2) == 1
    # concordant middle coefficient: B = b1 mod 2a1 and B = b2 mod 2a2
    # (b1 = b2 = D mod 2, so solve for the step k in B = b1 + 2 a1 k mod a2)
    k = (b2 - b1) // 2 * pow(a1, -1, a2) % a2 if a2 > 1 else 0
    B = b1 + 2 * a1 * k
    A = a1 * a2
    C, rem = divmod(B * B - D, 4 * A)
    assert rem == 0
    return _reduce_form(A, B, C)


def _principal(D: int) -> tuple[int, int, int]:
    b = D % 2
    return (1, b, (b * b - D) // 4)


@lru_cache(maxsize=None)
def class_group_2sylow(D: int) -> tuple[int, ...]:
    """Cyclic factors (2^a1, 2^a2, ...) of the 2-Sylow subgroup, by composition."""
    forms = reduced_forms(D)
    ident = _principal(D)
    current = set(forms)
    dims = []
    while True:
        two_torsion = sum(1 for f in current if compose(f, f) == ident)
        dims.append(two_torsion.bit_length() - 1)
        if dims[-1] == 0:
            break
        current = {compose(f, f) for f in current}
    factors = []
    for k in range(len(dims) - 1):
        factors.extend([2 ** (k + 1)] * (dims[k] - dims[k + 1]))
    return tuple(sorted(factors))


def g_invariant(n: int) -> tuple[int, bool]:
    """(g(n), parity flag) with g = h / 2^(t-1); flag True iff g is odd."""
    data = class_group_data(n)
    return data.g, data.g % 2 == 1


@lru_cache(maxsize=None)
def class_group_data(n: int) -> ClassGroupData:
    D = field_discriminant(n)
    h = len(reduced_forms(D))
    t = len(factorize(D))
    g, rem = divmod(h, 1 << (t - 1))
    if rem:
        raise ArithmeticError(f"genus theory violated: h = {h}, t = {t} for D = {D}")
    return ClassGroupData(n, D, h, t, g, redei_four_rank(n))


def _prime_discriminants(D: int) -> list[tuple[int, int]]:
    """Factor D into prime discriminants, as (prime, prime-discriminant) pairs."""
    out = []
    rest = D
    for p in sorted(factorize(abs(D))):
        if p == 2:
            continue
        ps = p if p % 4 == 1 else -p
        out.append((p, ps))
        rest //= ps
    if rest != 1:
        assert rest in (-4, 8, -8), rest
        out.append((2, rest))
    return sorted(out)


def redei_four_rank(n: int) -> int:
    """4-rank of Cl(Q(sqrt(-n))) from the F_2 rank of the Redei matrix."""
    D = field_discriminant(n)
    pieces = _prime_discriminants(D)
    t = len(pieces)
    rows = []
    for i, (p, _) in enumerate(pieces):
        row = 0
        for j, (_, dj) in enumerate(pieces):
            if i == j:
                bit = legendre_bit_2aware(D // dj, p)
            else:
                bit = legendre_bit_2aware(dj, p)
            row |= bit << j
        rows.append(row)
    return (t - 1) - gf2_rank(rows)


def legendre_bit_2aware(a: int, p: int) -> int:
    """Additive Kronecker symbol, allowing p = 2 (via (a/2))."""
    if p == 2:
        s = kronecker(a, 2)
        if s == 0:
            raise ValueError(f"(a/2) undefined for even a = {a}")
        return (1 - s) // 2
    return legendre_bit(a, p)


def genus_invariant(n: int, eps: int) -> int:
    """Parity (in F_2) of the genus invariant attached to the twist sign eps.

    For n = 7 mod 24 and eps = -1 the invariant is
    g(n) + sum over divisors d of n with d = 11 mod 24 of g(n/d) g(d);
    otherwise it is g(n) itself.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if n <= 0 or not is_squarefree(n) or n % 24 not in (3, 7):
        raise ValueError(f"genus invariant needs square-free n = 3 or 7 mod 24, got {n}")
    total = g_invariant(n)[0]
    if n % 24 == 7 and eps == -1:
        for d in _divisors(n):
            if d % 24 == 11:
                total += g_invariant(n // d)[0] * g_invariant(d)[0]
    return total % 2


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p in factorize(n):
        divs += [d * p for d in divs]
    return sorted(divs)
