"""Quadratic-twist curve models y^2 = x(x - e1*m)(x - e2*m)."""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .arith import is_square, is_squarefree


@dataclass(frozen=True)
class TwistCurve:
    """Member of a quadratic twist family with full rational 2-torsion.

    Weierstrass model: y^2 = x(x - e1*m)(x - e2*m).  The congruent-number
    family is (e1, e2) = (1, -1) with twist n > 0 (so n*y^2 = x^3 - x up to
    isomorphism); the tiling family is (e1, e2) = (1, -3).
    """

    e1: int
    e2: int
    m: int
    family: str = "two_torsion"

    def __post_init__(self):
        if self.e1 == self.e2 or self.e1 * self.e2 == 0:
            raise ValueError("need e1 != e2 and e1*e2 != 0")
        if self.m == 0 or not is_squarefree(self.m):
            raise ValueError(f"twist m must be square-free and nonzero, got {self.m}")
        if self.family == "congruent" and self.m < 0:
            raise ValueError("congruent family uses positive n")

    def ainvs(self) -> tuple[int, int, int, int, int]:
        e1, e2, m = self.e1, self.e2, self.m
        return (0, -(e1 + e2) * m, 0, e1 * e2 * m * m, 0)

    def two_torsion_roots(self) -> tuple[int, int, int]:
        return (0, self.e1 * self.m, self.e2 * self.m)

    def discriminant(self) -> int:
        e1, e2, m = self.e1, self.e2, self.m
        return 16 * (e1 * e2 * (e1 - e2)) ** 2 * m**6

    def label(self) -> str:
        if self.family == "congruent":
            return f"congruent({self.m})"
        if self.family == "tiling":
            return f"tiling({self.m})"
        return f"two_torsion({self.e1},{self.e2},{self.m})"


def congruent(n: int) -> TwistCurve:
    """The congruent-number twist n*y^2 = x^3 - x, i.e. y^2 = x(x-n)(x+n)."""
    return TwistCurve(1, -1, n, family="congruent")


def tiling(m: int) -> TwistCurve:
    """Twist of y^2 = x(x-1)(x+3) by square-free m."""
    return TwistCurve(1, -3, m, family="tiling")


def torsion_order(curve: TwistCurve) -> int:
    """Order of the rational torsion subgroup.

    Full 2-torsion is rational by construction.  A root r of the cubic lifts
    to rational 4-torsion iff both differences to the other roots are
    squares; an order-8 point would need a 4-torsion x-coordinate to land in
    2E(Q), tested by the all-differences-square criterion.
    """
    roots = curve.two_torsion_roots()
    for a in roots:
        d1, d2 = (a - r for r in roots if r != a)
        if not (is_square(d1) and is_square(d2)):
            continue
        # four rational 4-torsion points above (a, 0)
        st = isqrt(d1) * isqrt(d2)
        for x4 in (a + st, a - st):
            y2 = (x4 - roots[0]) * (x4 - roots[1]) * (x4 - roots[2])
            if is_square(y2) and all(is_square(x4 - r) for r in roots):
                return 16
        return 8
    return 4
