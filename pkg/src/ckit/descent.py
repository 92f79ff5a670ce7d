"""Complete 2-descent for twists y^2 = x(x - e1 m)(x - e2 m).

A Selmer candidate Lambda = (b1, b2) in Q(S,2)^2 corresponds to the torsor

    C_Lambda:  b1 z1^2 - b2 z2^2    = e1 m t^2
               b1 z1^2 - b1 b2 z3^2 = e2 m t^2

and belongs to the 2-Selmer group iff C_Lambda has points over R and over
Q_p for every p in S (solvability away from S is automatic).  The generic
path (`sel2`) tests every candidate at every place; for the tiling family
y^2 = x(x-1)(x+3) the conditions at the primes dividing the twist collapse
to an F_2 linear system built from the Redei matrix (`sel2_redei_fastpath`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, inf

from .arith import factorize, kronecker, legendre_bit, squarefree_part
from .curves import TwistCurve
from .gf2 import gf2_solve, gf2_span
from .lfunc import l_value_1

INF = inf


class PrecisionExhaustedError(Exception):
    """Hensel search hit its precision bound without a verdict (PRECISION_EXHAUSTED)."""


@dataclass(frozen=True)
class SelmerPair:
    b1: int
    b2: int


@dataclass(frozen=True)
class SelmerResult:
    s_set: tuple
    members: tuple[SelmerPair, ...]
    dim: int
    torsion_dim: int
    quotient_dim: int


def _validate_family(e1: int, e2: int, m: int) -> None:
    if e1 == e2 or e1 * e2 == 0:
        raise ValueError("need e1 != e2 and e1*e2 != 0")
    if m == 0:
        raise ValueError("twist m must be nonzero")


def s_set(e1: int, e2: int, m: int) -> list:
    """Places dividing 2*m*e1*e2*(e1-e2), plus infinity."""
    _validate_family(e1, e2, m)
    ps = sorted(factorize(2 * m * e1 * e2 * (e1 - e2)))
    return ps + [INF]


def torsion_lambdas(e1: int, e2: int, m: int) -> list[SelmerPair]:
    """Images of the four 2-torsion points, as square-free class pairs."""
    _validate_family(e1, e2, m)
    raw = [
        (1, 1),
        (e1 * e2, -e1 * m),
        (e1 * m, e1 * (e1 - e2)),
        (e2 * m, (e2 - e1) * m),
    ]
    return [SelmerPair(squarefree_part(x), squarefree_part(y)) for x, y in raw]


# ---------------------------------------------------------------------------
# local solvability


def _solvable_real(b1: int, b2: int, c1: int, c2: int) -> bool:
    """Sign analysis over R (t = 0 branch, then s = b1 z1^2 interval logic)."""
    if b1 > 0 and b2 > 0:
        return True
    lo, hi = (0, INF) if b1 > 0 else (-INF, 0)
    if b2 > 0:
        lo = max(lo, c1)
    else:
        hi = min(hi, c1)
    if b1 * b2 > 0:
        lo = max(lo, c2)
    else:
        hi = min(hi, c2)
    return lo <= hi


def _split_padic(b: int, p: int) -> tuple[int, int]:
    v = 0
    while b % p == 0:
        b //= p
        v += 1
    return v, b


def _solvable_odd_ramified(b1: int, b2: int, e1: int, e2: int, m: int, p: int) -> bool:
    """Closed-form local test at odd p with p || m, p coprime to 2 e1 e2 (e1-e2).

    Derived by Hensel analysis case by case on (v_p(b1), v_p(b2)); each case
    certifies a smooth liftable point, so this agrees with the bounded
    search (cross-checked in the tests).
    """
    a, u1 = _split_padic(b1, p)
    b, u2 = _split_padic(b2, p)
    m1 = m // p

    def sq(x: int) -> bool:
        return kronecker(x, p) == 1

    if (a, b) == (0, 0):
        return sq(u1) and sq(u2)
    if (a, b) == (1, 0):
        return sq(e1 * m1 * u1) and sq((e1 - e2) * m1 * u1 * u2)
    if (a, b) == (0, 1):
        return sq(-e1 * m1 * u2) and sq(e1 * e2 * u1)
    return sq(e2 * m1 * u1) and sq((e2 - e1) * m1 * u2)


def _normalize_state(state: tuple, p: int, modulus: int) -> tuple:
    """Scale by a unit so the first unit coordinate becomes 1."""
    for x in state:
        if x % p:
            s = pow(x, -1, modulus)
            return tuple(v * s % modulus for v in state)
    raise AssertionError("state not primitive")


def _hensel_search(b1: int, b2: int, c1: int, c2: int, p: int, K: int,
                   state_cap: int = 200_000) -> bool:
    """Search primitive solutions mod p^K, accepting on a smooth-lift certificate.

    Each equation is first divided by its p-content; that leaves the solution
    set untouched but keeps the Jacobian minors as small as possible, so
    smooth points certify at the lowest usable level.
    """
    eqs = []
    for vec in ((b1, -b2, 0, -c1), (b1, 0, -b1 * b2, -c2)):
        shift = min(_split_padic(x, p)[0] for x in vec if x)
        eqs.append(tuple(x // p**shift for x in vec))
    f1, f2 = eqs

    def residual(st, modulus):
        return (
            sum(c * x * x for c, x in zip(f1, st)) % modulus == 0
            and sum(c * x * x for c, x in zip(f2, st)) % modulus == 0
        )

    def certified(state, level) -> bool:
        row1 = tuple(2 * c * x for c, x in zip(f1, state))
        row2 = tuple(2 * c * x for c, x in zip(f2, state))
        best = None
        for i in range(4):
            for j in range(i + 1, 4):
                minor = row1[i] * row2[j] - row1[j] * row2[i]
                if minor:
                    v = 0
                    while minor % p == 0:
                        minor //= p
                        v += 1
                    if best is None or v < best:
                        best = v
                        if best == 0:
                            break
        return best is not None and level >= 2 * best + 1

    from itertools import product

    deltas = list(product(range(p), repeat=4))
    states = set()
    for st in deltas:
        if st != (0, 0, 0, 0) and residual(st, p):
            states.add(_normalize_state(st, p, p))
    level = 1
    while True:
        if not states:
            return False
        for st in states:
            if certified(st, level):
                return True
        if level >= K:
            raise PrecisionExhaustedError(
                f"undecided at precision {p}^{K} for ({b1},{b2},{c1},{c2})"
            )
        modulus = p ** (level + 1)
        step = p**level
        nxt = set()
        for z1, z2, z3, t in states:
            for d1, d2, d3, d4 in deltas:
                cand = (z1 + d1 * step, z2 + d2 * step, z3 + d3 * step, t + d4 * step)
                if residual(cand, modulus):
                    nxt.add(_normalize_state(cand, p, modulus))
        if len(nxt) > state_cap:
            raise PrecisionExhaustedError("state cap exceeded")
        states = nxt
        level += 1


_SEARCH_CACHE: dict = {}


def _padic_class(b: int, p: int) -> tuple[int, int]:
    v, u = _split_padic(b, p)
    if p == 2:
        return v % 2, u % 8
    return v % 2, kronecker(u, p)


def _place_tester(e1: int, e2: int, m: int, v):
    """Memoized verdict function (b1, b2) -> bool for one place of S.

    Verdicts only depend on the local square classes of b1 and b2 (scaling
    any of b1, b2 by a square is absorbed into the z_i), which keeps the
    number of genuinely distinct local computations per curve tiny.
    """
    c1, c2 = e1 * m, e2 * m
    if v == INF:
        memo = {}

        def test_inf(b1, b2):
            key = (b1 > 0, b2 > 0)
            if key not in memo:
                memo[key] = _solvable_real(b1, b2, c1, c2)
            return memo[key]

        return test_inf
    p = int(v)
    aux = 2 * e1 * e2 * (e1 - e2)
    if p % 2 and aux % p and m % p == 0 and (m // p) % p:
        m1 = m // p
        k10 = kronecker(e1 * m1, p), kronecker((e1 - e2) * m1, p)
        k01 = kronecker(-e1 * m1, p), kronecker(e1 * e2, p)
        k11 = kronecker(e2 * m1, p), kronecker((e2 - e1) * m1, p)
        ucache: dict[int, tuple[int, int]] = {}

        def split(b):
            if b not in ucache:
                vb, ub = _split_padic(b, p)
                ucache[b] = (vb, kronecker(ub, p))
            return ucache[b]

        def test_closed(b1, b2):
            a, k1 = split(b1)
            b, k2 = split(b2)
            if a == 0 and b == 0:
                return k1 == 1 and k2 == 1
            if a == 1 and b == 0:
                return k10[0] * k1 == 1 and k10[1] * k1 * k2 == 1
            if a == 0 and b == 1:
                return k01[0] * k2 == 1 and k01[1] * k1 == 1
            return k11[0] * k1 == 1 and k11[1] * k2 == 1

        return test_closed

    def test_search(b1, b2):
        key = (p, c1, c2, _padic_class(b1, p), _padic_class(b2, p))
        if key not in _SEARCH_CACHE:
            K = 2 * _split_padic(4 * b1 * b2 * e1 * e2 * (e1 - e2) * m, p)[0] + 3
            _SEARCH_CACHE[key] = _hensel_search(b1, b2, c1, c2, p, K)
        return _SEARCH_CACHE[key]

    return test_search


def clambda_locally_solvable(e1: int, e2: int, m: int, lam, v) -> bool:
    """Whether the torsor for Lambda = (b1, b2) has a Q_v-point; v must lie in S."""
    _validate_family(e1, e2, m)
    if v not in s_set(e1, e2, m):
        raise ValueError(f"place {v} is outside S; never consulted")
    b1, b2 = (lam.b1, lam.b2) if isinstance(lam, SelmerPair) else lam
    b1, b2 = squarefree_part(b1), squarefree_part(b2)
    return _place_tester(e1, e2, m, v)(b1, b2)


# ---------------------------------------------------------------------------
# Selmer group assembly


def _class_group_elements(gens: list[int]) -> list[int]:
    """All subset products of the generators, in fixed bitmask order."""
    out = []
    for mask in range(1 << len(gens)):
        val = 1
        for i, g in enumerate(gens):
            if mask >> i & 1:
                val *= g
        out.append(val)
    return out


def _ordered_places(e1: int, e2: int, m: int) -> list:
    """Places of S ordered by test cost: R, closed-form odd primes, then searches."""
    places = s_set(e1, e2, m)
    aux = 2 * e1 * e2 * (e1 - e2)
    closed, search = [], []
    for p in places:
        if p == INF:
            continue
        if p % 2 and aux % p and m % p == 0 and (m // p) % p:
            closed.append(p)
        else:
            search.append(p)
    return [INF] + closed + sorted(search, reverse=True)


def _assemble(e1: int, e2: int, m: int, members: list[SelmerPair]) -> SelmerResult:
    places = s_set(e1, e2, m)
    k = len(members)
    dim = k.bit_length() - 1
    if 1 << dim != k:
        raise ArithmeticError(f"member count {k} is not a power of 2")
    tors = torsion_lambdas(e1, e2, m)
    span = {(1, 1)}
    for t in tors:
        if (t.b1, t.b2) not in span:
            span |= {
                (squarefree_part(a * t.b1), squarefree_part(b * t.b2)) for a, b in span
            }
    member_set = {(p.b1, p.b2) for p in members}
    if not span <= member_set:
        raise ArithmeticError("torsion image escapes the computed Selmer set")
    tdim = len(span).bit_length() - 1
    return SelmerResult(tuple(places), tuple(members), dim, tdim, dim - tdim)


@lru_cache(maxsize=None)
def sel2(e1: int, e2: int, m: int) -> SelmerResult:
    """2-Selmer group by everywhere-local solvability over all of Q(S,2)^2."""
    _validate_family(e1, e2, m)
    finite = [p for p in s_set(e1, e2, m) if p != INF]
    gens = [-1] + finite
    universe = _class_group_elements(gens)
    testers = [_place_tester(e1, e2, m, v) for v in _ordered_places(e1, e2, m)]
    members = []
    for b1 in universe:
        for b2 in universe:
            if all(t(b1, b2) for t in testers):
                members.append(SelmerPair(b1, b2))
    return _assemble(e1, e2, m, members)


# ---------------------------------------------------------------------------
# Redei fast path for the tiling curve y^2 = x(x-1)(x+3)


@dataclass(frozen=True)
class RedeiBlockData:
    primes: tuple[int, ...]
    a_rows: tuple[int, ...]  # k rows of the Redei matrix as bitmasks
    d_diagonals: dict
    block_rows: tuple[int, ...]  # 2k rows, 2k columns (x1 bits low, x2 bits high)
    rhs: tuple[int, ...]  # 2k right-hand-side bits (z_{c1} then z_{c2})

    def __post_init__(self):
        for i, row in enumerate(self.a_rows):
            if bin(row).count("1") % 2:
                raise AssertionError(f"Redei row {i} has odd weight")


def _z_vector(d: int, ells: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(legendre_bit(d, ell) for ell in ells)


def redei_block_system(n: int, q: int, c1: int, c2: int) -> RedeiBlockData:
    """F_2 system encoding solvability of the torsor at every prime dividing n."""
    if n <= 0 or gcd(n, 6) != 1:
        raise ValueError("n must be positive and coprime to the fixed bad primes {2, 3}")
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        raise ValueError("n must be square-free")
    ells = tuple(sorted(fac))
    k = len(ells)
    a_rows = []
    for i, ell in enumerate(ells):
        row = 0
        for j, ellj in enumerate(ells):
            if i == j:
                bit = legendre_bit(n // ell, ell)
            else:
                bit = legendre_bit(ellj, ell)
            row |= bit << j
        a_rows.append(row)
    diag = {d: _z_vector(d, ells) for d in (q, -q, -3)}

    def dmat(d):
        return [diag[d][i] << i for i in range(k)]

    block = []
    for i in range(k):  # (A + D_q) x1 + D_{-3} x2 = z_{c1}
        block.append((a_rows[i] ^ dmat(q)[i]) | (dmat(-3)[i] << k))
    for i in range(k):  # (A + D_{-q}) x2 = z_{c2}
        block.append((a_rows[i] ^ dmat(-q)[i]) << k)
    rhs = _z_vector(c1, ells) + _z_vector(c2, ells)
    return RedeiBlockData(ells, tuple(a_rows), diag, tuple(block), rhs)


@lru_cache(maxsize=None)
def sel2_redei_fastpath(n: int, eps: int) -> SelmerResult:
    """Selmer group of the tiling twist by eps*n via the Redei linear system.

    The twist factors as m = q * n1 with n1 the part of n coprime to the
    fixed bad primes {2, 3} and q = eps * (n/n1).  The solvability
    conditions at the primes dividing n1 become the block system; the
    conditions at 2, 3 and infinity are evaluated directly.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if n <= 0:
        raise ValueError("fast path needs positive n")
    e1, e2, m = 1, -3, eps * n
    n1 = n
    q0 = 1
    for p in (2, 3):
        if n1 % p == 0:
            q0 *= p
            n1 //= p
    q = eps * q0
    ells = tuple(sorted(factorize(n1))) if n1 > 1 else ()
    k = len(ells)
    c_universe = _class_group_elements([-1, 2, 3])
    testers = [_place_tester(e1, e2, m, v) for v in (INF, 3, 2)]
    found = set()
    for c1 in c_universe:
        for c2 in c_universe:
            if k:
                data = redei_block_system(n1, q, c1, c2)
                sol = gf2_solve(list(data.block_rows), list(data.rhs), 2 * k)
                if sol is None:
                    continue
                particular, basis = sol
                candidates = [particular ^ v for v in gf2_span(basis)]
            else:
                candidates = [0]
            for vec in candidates:
                b1 = c1
                b2 = c2
                for i, ell in enumerate(ells):
                    if vec >> i & 1:
                        b1 *= ell
                    if vec >> (k + i) & 1:
                        b2 *= ell
                if all(t(b1, b2) for t in testers):
                    found.add((b1, b2))
    finite = [p for p in s_set(e1, e2, m) if p != INF]
    gens = [-1] + finite
    ordered = [
        SelmerPair(b1, b2)
        for b1 in _class_group_elements(gens)
        for b2 in _class_group_elements(gens)
        if (b1, b2) in found
    ]
    return _assemble(e1, e2, m, ordered)


def monsky_parity_check(curve: TwistCurve) -> bool:
    """quotient-dimension parity agrees with the analytic-rank parity (2-parity)."""
    if curve.family == "congruent":
        eps = 1 if curve.m % 8 in (1, 2, 3) else -1
    else:
        eps = l_value_1(curve).epsilon
    if curve.e1 == 1 and curve.e2 == -3:
        res = sel2_redei_fastpath(abs(curve.m), 1 if curve.m > 0 else -1)
    else:
        res = sel2(curve.e1, curve.e2, curve.m)
    return (res.quotient_dim % 2 == 0) == (eps == 1)
