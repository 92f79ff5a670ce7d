"""Tate's algorithm over Q: Kodaira type, conductor exponent, Tamagawa number.

Implements the full classification at every prime, including the additive
subtypes at p = 2, 3, with the non-minimal restart.  Conductor exponents
come out of the step reached (equivalently Ogg-Saito via the component
count), valid at all primes once the model is locally minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .arith import factorize, kronecker
from .curves import TwistCurve


@dataclass(frozen=True)
class LocalData:
    p: int
    kodaira: str
    conductor_exponent: int
    tamagawa: int
    reduction: str  # good | split | nonsplit | additive
    minimality_rescalings: int = 0  # times the model was divided by p^(1..6)


def b_invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a):
    b2, b4, b6, _ = b_invariants(a)
    return b2 * b2 - 24 * b4, -b2**3 + 36 * b2 * b4 - 216 * b6


def discriminant(a) -> int:
    b2, b4, b6, b8 = b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def transform(a, u: int, r: int, s: int, t: int):
    """Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""
    a1, a2, a3, a4, a6 = a
    n1 = a1 + 2 * s
    n2 = a2 - s * a1 + 3 * r - s * s
    n3 = a3 + r * a1 + 2 * t
    n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    n6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
    out = []
    for k, v in zip((1, 2, 3, 4, 6), (n1, n2, n3, n4, n6)):
        q, rem = divmod(v, u**k)
        if rem:
            raise ValueError("transform does not preserve integrality")
        out.append(q)
    return tuple(out)


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _exact_div(x: int, d: int) -> int:
    q, r = divmod(x, d)
    if r:
        raise ArithmeticError(f"expected {d} | {x}")
    return q


def _quad_roots(qa: int, qb: int, qc: int, p: int) -> tuple[bool, int]:
    """(separable, #roots in F_p) of qa*Y^2 + qb*Y + qc mod p, qa a p-unit."""
    if p == 2:
        sep = qb % 2 == 1
        if not sep:
            return False, -1
        return True, 2 if qc % 2 == 0 else 0
    disc = (qb * qb - 4 * qa * qc) % p
    if disc == 0:
        return False, -1
    return True, 2 if kronecker(disc, p) == 1 else 0


def _quad_double_root(qa: int, qb: int, qc: int, p: int) -> int:
    """The double root mod p of an inseparable/degenerate quadratic."""
    if p == 2:
        return (qc * qa) % 2  # qa odd; square roots are the identity on F_2
    return (-qb * pow(2 * qa, -1, p)) % p


def _cubic_roots(c2: int, c1: int, c0: int, p: int) -> list[tuple[int, int]]:
    """Roots with multiplicity of T^3 + c2 T^2 + c1 T + c0 over F_p."""
    out = []
    for r in range(p):
        if (r**3 + c2 * r * r + c1 * r + c0) % p:
            continue
        if (3 * r * r + 2 * c2 * r + c1) % p:
            out.append((r, 1))
        elif (3 * r + c2) % p:
            out.append((r, 2))
        else:
            out.append((r, 3))
    return out


def _singular_point(a, p: int) -> tuple[int, int]:
    """Coordinates mod p of the singular point of the reduced curve."""
    a1, a2, a3, a4, a6 = a
    if p == 2:
        for x in range(2):
            for y in range(2):
                f = y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)
                fx = a1 * y - (3 * x * x + 2 * a2 * x + a4)
                fy = 2 * y + a1 * x + a3
                if f % 2 == 0 and fx % 2 == 0 and fy % 2 == 0:
                    return x, y
        raise ArithmeticError("no singular point found mod 2")
    b2, b4, b6, _ = b_invariants(a)
    for x in range(p):
        g = 4 * x**3 + b2 * x * x + 2 * b4 * x + b6
        dg = 12 * x * x + 2 * b2 * x + 2 * b4
        if g % p == 0 and dg % p == 0:
            y = (-(a1 * x + a3) * pow(2, -1, p)) % p
            return x, y
    raise ArithmeticError(f"no singular point found mod {p}")


def _prepare_cubic_stage(a, p: int):
    """Translate so that p|a1, p|a2, p^2|a3, p^2|a4, p^3|a6."""
    targets = (1, 1, 2, 2, 3)

    def ok(av):
        return all(_vp(av[i], p) >= targets[i] for i in range(5))

    if p > 3:
        inv2 = pow(2, -1, p * p)
        a = transform(a, 1, 0, (-a[0] * inv2) % (p * p), 0)
        a = transform(a, 1, 0, 0, (-a[2] * inv2) % (p * p))
        if not ok(a):
            raise ArithmeticError("cubic-stage normalization failed")
        return a
    p2 = p * p
    for s in range(p2):
        for t in range(p2):
            for r in range(p2):
                cand = transform(a, 1, r, s, t)
                if ok(cand):
                    return cand
    raise ArithmeticError("cubic-stage normalization failed")


def tate_local_ainvs(a, p: int) -> LocalData:
    a = tuple(int(x) for x in a)
    rescalings = 0
    while True:
        delta = discriminant(a)
        n = _vp(delta, p)
        if n == 0:
            return LocalData(p, "I0", 0, 1, "good", rescalings)
        x0, y0 = _singular_point(a, p)
        a = transform(a, 1, x0, 0, y0)
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = b_invariants(a)
        assert a3 % p == 0 and a4 % p == 0 and a6 % p == 0
        if b2 % p != 0:
            # multiplicative: tangent quadratic T^2 + a1 T - a2
            sep, nroots = _quad_roots(1, a1 % p, (-a2) % p, p)
            assert sep
            if nroots == 2:
                return LocalData(p, f"I{n}", 1, n, "split", rescalings)
            c = 2 if n % 2 == 0 else 1
            return LocalData(p, f"I{n}", 1, c, "nonsplit", rescalings)
        if _vp(a6, p) < 2:
            return LocalData(p, "II", n, 1, "additive", rescalings)
        if _vp(b8, p) < 3:
            return LocalData(p, "III", n - 1, 2, "additive", rescalings)
        if _vp(b6, p) < 3:
            sep, nroots = _quad_roots(
                1, _exact_div(a3, p) % p, (-_exact_div(a6, p * p)) % p, p
            )
            assert sep
            c = 3 if nroots == 2 else 1
            return LocalData(p, "IV", n - 2, c, "additive", rescalings)
        a = _prepare_cubic_stage(a, p)
        a1, a2, a3, a4, a6 = a
        roots = _cubic_roots(
            _exact_div(a2, p) % p,
            _exact_div(a4, p * p) % p,
            _exact_div(a6, p**3) % p,
            p,
        )
        max_mult = max((m for _, m in roots), default=1)
        if max_mult == 1:
            return LocalData(p, "I0*", n - 4, 1 + len(roots), "additive", rescalings)
        if max_mult == 2:
            alpha = next(r for r, m in roots if m == 2)
            a = transform(a, 1, p * alpha, 0, 0)
            return _im_star_loop(a, p, n, rescalings)
        # triple root
        alpha = next(r for r, m in roots if m == 3)
        a = transform(a, 1, p * alpha, 0, 0)
        a1, a2, a3, a4, a6 = a
        qb, qc = _exact_div(a3, p * p) % p, (-_exact_div(a6, p**4)) % p
        sep, nroots = _quad_roots(1, qb, qc, p)
        if sep:
            c = 3 if nroots == 2 else 1
            return LocalData(p, "IV*", n - 6, c, "additive", rescalings)
        rho = _quad_double_root(1, qb, qc, p)
        a = transform(a, 1, 0, 0, p * p * rho)
        a1, a2, a3, a4, a6 = a
        if _vp(a4, p) < 4:
            return LocalData(p, "III*", n - 7, 2, "additive", rescalings)
        if _vp(a6, p) < 6:
            return LocalData(p, "II*", n - 8, 1, "additive", rescalings)
        # non-minimal: rescale and restart
        a = transform(a, p, 0, 0, 0)
        rescalings += 1


def _im_star_loop(a, p: int, n: int, rescalings: int) -> LocalData:
    """Subtypes I_m* (m >= 1); the cubic has its double root at T = 0."""
    assert _vp(a[1], p) == 1 and _vp(a[3], p) >= 3 and _vp(a[4], p) >= 4
    m = 1
    while True:
        a1, a2, a3, a4, a6 = a
        k = (m + 1) // 2
        if m % 2 == 1:
            qa = 1
            qb = _exact_div(a3, p ** (1 + k)) % p
            qc = (-_exact_div(a6, p ** (2 + 2 * k))) % p
        else:
            qa = _exact_div(a2, p) % p
            qb = _exact_div(a4, p ** (2 + k)) % p
            qc = _exact_div(a6, p ** (3 + 2 * k)) % p
        sep, nroots = _quad_roots(qa, qb, qc, p)
        if sep:
            c = 4 if nroots == 2 else 2
            return LocalData(p, f"I{m}*", n - 4 - m, c, "additive", rescalings)
        rho = _quad_double_root(qa, qb, qc, p)
        if m % 2 == 1:
            a = transform(a, 1, 0, 0, p ** (1 + k) * rho)
        else:
            a = transform(a, 1, p ** (1 + k) * rho, 0, 0)
        m += 1
        if m > n:
            raise ArithmeticError("I_m* loop failed to terminate")


@lru_cache(maxsize=None)
def _tate_cached(ainvs: tuple, p: int) -> LocalData:
    return tate_local_ainvs(ainvs, p)


def tate_local(curve: TwistCurve, p: int) -> LocalData:
    """Local reduction data of the twist curve at p."""
    if p < 2:
        raise ValueError("p must be prime")
    return _tate_cached(curve.ainvs(), p)


@lru_cache(maxsize=None)
def conductor(curve: TwistCurve) -> int:
    """Product of p^(conductor exponent) over the bad primes."""
    N = 1
    for p in sorted(factorize(curve.discriminant())):
        N *= p ** tate_local(curve, p).conductor_exponent
    return N


def bad_primes(curve: TwistCurve) -> list[int]:
    return sorted(factorize(curve.discriminant()))


def tamagawa_product(curve: TwistCurve) -> int:
    prod = 1
    for p in bad_primes(curve):
        prod *= tate_local(curve, p).tamagawa
    return prod


def minimal_scale(curve: TwistCurve) -> int:
    """u with disc(curve) = u^12 * disc(minimal model)."""
    u = 1
    for p in bad_primes(curve):
        u *= p ** tate_local(curve, p).minimality_rescalings
    return u
