"""Analytic side: Frobenius traces, Dirichlet coefficients, L(1), periods, analytic Sha."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, exp, log, pi, sqrt

import numpy as np
from scipy.integrate import quad

from .arith import factorize, jacobi, primes_up_to, spf_table
from .curves import TwistCurve, congruent, tiling, torsion_order
from .tate import (
    LocalData,
    bad_primes,
    conductor,
    minimal_scale,
    tamagawa_product,
    tate_local,
)

__all__ = [
    "TwistCurve",
    "congruent",
    "tiling",
    "torsion_order",
    "LocalData",
    "tate_local",
    "conductor",
    "bad_primes",
    "tamagawa_product",
    "LSeriesEval",
    "ShaResult",
    "ap",
    "an_coeffs",
    "l_value_1",
    "real_period",
    "real_period_two_ways",
    "analytic_sha",
    "base_omega",
    "AmbiguousSignError",
    "NotRankZeroError",
    "RoundingUnstableError",
    "PeriodMismatchError",
]


class AmbiguousSignError(Exception):
    """Neither functional-equation sign is numerically self-consistent."""


class NotRankZeroError(Exception):
    """L(1) is not provably nonzero with sign +1 (NOT_RANK_ZERO)."""


class RoundingUnstableError(Exception):
    """Analytic Sha does not round stably to a small-denominator rational."""


class PeriodMismatchError(Exception):
    """AGM and quadrature period computations disagree beyond tolerance."""


def _ap_point_count(a2: int, a4: int, a6: int, p: int) -> int:
    """-sum_x chi(x^3 + a2 x^2 + a4 x + a6) over F_p via a residue table."""
    x = np.arange(p, dtype=np.int64)
    f = ((x * x % p) * ((x + a2) % p) + (a4 % p) * x + a6) % p
    sq = np.zeros(p, dtype=bool)
    sq[x * x % p] = True
    nonzero = f != 0
    n_sq = int(np.count_nonzero(sq[f] & nonzero))
    return -(2 * n_sq - int(np.count_nonzero(nonzero)))


def ap(curve: TwistCurve, p: int) -> int:
    """Trace of Frobenius at a prime of good reduction, by direct point counting."""
    if p < 3 or curve.discriminant() % p == 0:
        raise ValueError(f"p = {p} is not a good odd prime for {curve.label()}")
    _, a2, _, a4, _ = curve.ainvs()
    return _ap_point_count(a2 % p, a4 % p, 0, p)


# per (e1, e2): dict prime -> a_p of the m = 1 member, plus the limit filled so far
_BASE_AP: dict[tuple[int, int], tuple[int, dict[int, int]]] = {}


def _base_prime_aps(e1: int, e2: int, limit: int) -> dict[int, int]:
    filled, table = _BASE_AP.get((e1, e2), (0, {}))
    if limit > filled:
        base = TwistCurve(e1, e2, 1)
        bad = 2 * base.discriminant()
        for p in primes_up_to(limit):
            if p > filled and bad % p != 0:
                table[p] = ap(base, p)
        _BASE_AP[(e1, e2)] = (limit, table)
    return table


def _bad_prime_ap(curve: TwistCurve, p: int) -> int:
    ld = tate_local(curve, p)
    if ld.reduction == "split":
        return 1
    if ld.reduction == "nonsplit":
        return -1
    if ld.reduction == "additive":
        return 0
    raise ArithmeticError(
        f"good reduction at p = {p} on a non-minimal model is not supported"
    )


def an_coeffs(curve: TwistCurve, M: int) -> np.ndarray:
    """Dirichlet coefficients a_1..a_M (index 0 unused).

    Good-prime traces come from the m = 1 member of the family twisted by
    the quadratic character of m (cross-checked against direct point counts
    in the test suite); bad primes take 0/+1/-1 by reduction type.  Prime
    powers follow the Hecke recursion, the rest is multiplicativity.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    a = np.zeros(M + 1, dtype=np.int64)
    a[1] = 1
    if M == 1:
        return a
    bad = set(bad_primes(curve)) | {2}
    base = _base_prime_aps(curve.e1, curve.e2, M)
    m_twist = curve.m
    for p in primes_up_to(M):
        if p in bad:
            ap_val = _bad_prime_ap(curve, p)
            pk = p * p
            a[p] = ap_val
            while pk <= M:
                a[pk] = a[pk // p] * ap_val
                pk *= p
        else:
            ap_val = jacobi(m_twist % p, p) * base[p] if abs(m_twist) != 1 else base[p]
            if m_twist == -1:
                ap_val = jacobi(p - 1, p) * base[p]
            a[p] = ap_val
            prev, cur, pk = 1, ap_val, p * p
            while pk <= M:
                prev, cur = cur, ap_val * cur - p * prev
                a[pk] = cur
                pk *= p
    spf = spf_table(M)
    for n in range(2, M + 1):
        p = int(spf[n])
        pk, rest = p, n // p
        while rest % p == 0:
            pk *= p
            rest //= p
        if rest > 1:
            a[n] = a[pk] * a[rest]
    return a


@dataclass(frozen=True)
class LSeriesEval:
    value: float
    abs_error_bound: float
    truncation: int
    epsilon: int
    conductor: int


def l_value_1(curve: TwistCurve, digits: int = 9, t_check: float = 1.2) -> LSeriesEval:
    """L(1) by the exponentially weighted sum, with the sign inferred numerically.

    G(t) = sum_{m<=M} (a_m/m) (exp(-2 pi m/(t sqrt N)) + eps exp(-2 pi m t/sqrt N))
    is t-independent for the true sign eps; the returned value is G(1) for
    the sign minimizing |G(1) - G(t_check)|.
    """
    N = conductor(curve)
    M = ceil(sqrt(N) * (8 / pi) * log(10) * digits)
    coeffs = an_coeffs(curve, M).astype(np.float64)
    mm = np.arange(1, M + 1, dtype=np.float64)
    w = coeffs[1:] / mm
    c = 2 * pi / sqrt(N)
    with np.errstate(under="ignore"):
        s1 = float(w @ np.exp(-c * mm))
        s_lo = float(w @ np.exp(-c * mm / t_check))
        s_hi = float(w @ np.exp(-c * mm * t_check))
    diffs = {}
    for eps in (1, -1):
        g1 = (1 + eps) * s1
        gt = s_lo + eps * s_hi
        diffs[eps] = abs(g1 - gt)
    tol = 10.0 ** (-8)
    if diffs[1] > 10 * tol and diffs[-1] > 10 * tol:
        raise AmbiguousSignError(
            f"AMBIGUOUS sign for {curve.label()}: diffs {diffs[1]:.3g}, {diffs[-1]:.3g}"
        )
    eps = 1 if diffs[1] <= diffs[-1] else -1
    c_slow = c / t_check
    tail = 2 * sqrt(3) * exp(-c_slow * (M + 1)) / max(1 - exp(-c_slow), 1e-300)
    value = (1 + eps) * s1
    return LSeriesEval(value, tail + diffs[eps], M, eps, N)


def _agm(x: float, y: float) -> float:
    while abs(x - y) > 1e-15 * x:
        x, y = (x + y) / 2, sqrt(x * y)
    return (x + y) / 2


def real_period_two_ways(curve: TwistCurve) -> tuple[float, float]:
    """Neron real period of the minimal model by AGM and by adaptive quadrature."""
    u = minimal_scale(curve)
    r1, r2, r3 = sorted(curve.two_torsion_roots(), reverse=True)
    A, B = r1 - r2, r1 - r3
    agm_val = 2 * u * pi / _agm(sqrt(B), sqrt(A))
    integral, est_err = quad(
        lambda t: 1.0 / sqrt((t * t + A) * (t * t + B)),
        0.0,
        np.inf,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    quad_val = 4 * u * integral
    return agm_val, quad_val


def real_period(curve: TwistCurve, tol: float = 1e-9) -> float:
    agm_val, quad_val = real_period_two_ways(curve)
    if abs(agm_val - quad_val) > tol:
        raise PeriodMismatchError(
            f"period methods disagree for {curve.label()}: {agm_val} vs {quad_val}"
        )
    return agm_val


_BASE_OMEGA: list[float] = []


def base_omega() -> float:
    """The normalizing period: half the Neron period of the m = 1 congruent curve."""
    if not _BASE_OMEGA:
        _BASE_OMEGA.append(real_period(congruent(1)) / 2)
    return _BASE_OMEGA[0]


@dataclass(frozen=True)
class ShaResult:
    value: float
    rounded: Fraction
    parity: str
    residual: float


def analytic_sha(
    curve: TwistCurve, residual_tol: float = 1e-3, nonzero_factor: float = 10.0
) -> ShaResult:
    """BSD leading-term quotient L(1)/Omega / (prod c_l / #tor^2), rounded to quarters."""
    lv = l_value_1(curve)
    if lv.epsilon != 1 or abs(lv.value) <= nonzero_factor * max(lv.abs_error_bound, 1e-12):
        raise NotRankZeroError(f"NOT_RANK_ZERO: {curve.label()}")
    omega = real_period(curve)
    tor = torsion_order(curve)
    sha = lv.value / omega * tor * tor / tamagawa_product(curve)
    quarters = round(sha * 4)
    residual = abs(sha - quarters / 4)
    if residual > residual_tol or quarters == 0:
        raise RoundingUnstableError(
            f"ROUNDING_UNSTABLE: {curve.label()} gives {sha} (residual {residual:.2e})"
        )
    rounded = Fraction(quarters, 4)
    return ShaResult(sha, rounded, "even" if rounded.numerator % 2 == 0 else "odd", residual)
