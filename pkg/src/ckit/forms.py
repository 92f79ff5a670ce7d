"""Trace-zero quaternion vectors and positive-definite integer ternary forms.

A vector v = x*i + y*j + z*k in the trace-zero part of the Hamilton
quaternions has reduced norm nrd(v) = x^2 + y^2 + z^2.  Lattices spanned by
three such vectors carry the restriction of nrd as a positive-definite
ternary quadratic form; counting lattice vectors of a given norm is the
combinatorial engine behind the central-value formulas in `ckit.tunnell`.

Gram storage convention: `gram[i][i]` is nrd of the i-th basis vector and
`gram[i][j]` (i != j) is the *doubled* polarization 2*B(v_i, v_j), so every
stored entry is an integer and

    value(v) = sum_i gram[i][i]*v_i^2 + sum_{i<j} gram[i][j]*v_i*v_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class QuaternionVec:
    """Rational coefficients of i, j, k."""

    x: Fraction
    y: Fraction
    z: Fraction

    def __init__(self, x, y, z):
        object.__setattr__(self, "x", Fraction(x))
        object.__setattr__(self, "y", Fraction(y))
        object.__setattr__(self, "z", Fraction(z))

    def __add__(self, other: "QuaternionVec") -> "QuaternionVec":
        return QuaternionVec(self.x + other.x, self.y + other.y, self.z + other.z)

    def __rmul__(self, a) -> "QuaternionVec":
        a = Fraction(a)
        return QuaternionVec(a * self.x, a * self.y, a * self.z)


def nrd(v: QuaternionVec) -> Fraction:
    """Reduced norm x^2 + y^2 + z^2 (nonnegative, zero only at 0)."""
    return v.x * v.x + v.y * v.y + v.z * v.z


def polarization(u: QuaternionVec, v: QuaternionVec) -> Fraction:
    """Bilinear form B(u, v) = (nrd(u+v) - nrd(u) - nrd(v)) / 2."""
    return (nrd(u + v) - nrd(u) - nrd(v)) / 2


class TernaryForm:
    """Positive-definite integral ternary form in doubled-off-diagonal storage."""

    __slots__ = ("gram", "_twice")

    def __init__(self, gram: Iterable[Iterable[int]]):
        g = tuple(tuple(int(e) for e in row) for row in gram)
        if len(g) != 3 or any(len(r) != 3 for r in g):
            raise ValueError("gram must be 3x3")
        for i in range(3):
            for j in range(3):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram must be symmetric")
        object.__setattr__(self, "gram", g)
        # twice the true Gram matrix: T[i][i] = 2*gram[i][i], T[i][j] = gram[i][j]
        t = [[g[i][j] if i != j else 2 * g[i][i] for j in range(3)] for i in range(3)]
        object.__setattr__(self, "_twice", tuple(tuple(r) for r in t))
        if not (self._minor(1) > 0 and self._minor(2) > 0 and self._minor(3) > 0):
            raise ValueError("form is not positive definite")

    def _minor(self, k: int) -> int:
        t = self._twice
        if k == 1:
            return t[0][0]
        if k == 2:
            return t[0][0] * t[1][1] - t[0][1] ** 2
        return _det3(t)

    def __eq__(self, other) -> bool:
        return isinstance(other, TernaryForm) and self.gram == other.gram

    def __hash__(self) -> int:
        return hash(self.gram)

    def __repr__(self) -> str:
        return f"TernaryForm({list(map(list, self.gram))})"

    def value(self, v: tuple[int, int, int]) -> int:
        g = self.gram
        x, y, z = v
        return (
            g[0][0] * x * x
            + g[1][1] * y * y
            + g[2][2] * z * z
            + g[0][1] * x * y
            + g[0][2] * x * z
            + g[1][2] * y * z
        )

    @property
    def det_twice(self) -> int:
        """Determinant of twice the Gram matrix (8 * det of the true Gram)."""
        return _det3(self._twice)

    def to_json(self) -> dict:
        return {"gram": [list(row) for row in self.gram]}

    @classmethod
    def from_json(cls, obj: dict) -> "TernaryForm":
        return cls(obj["gram"])


def _det3(t) -> int:
    return (
        t[0][0] * (t[1][1] * t[2][2] - t[1][2] ** 2)
        - t[0][1] * (t[0][1] * t[2][2] - t[1][2] * t[0][2])
        + t[0][2] * (t[0][1] * t[1][2] - t[1][1] * t[0][2])
    )


def _cofactor_diag(t, i: int) -> int:
    j, k = [a for a in range(3) if a != i]
    return t[j][j] * t[k][k] - t[j][k] ** 2


def gram_from_basis(b1: QuaternionVec, b2: QuaternionVec, b3: QuaternionVec) -> TernaryForm:
    """Gram matrix of the reduced-norm form on Z*b1 + Z*b2 + Z*b3."""
    basis = (b1, b2, b3)
    gram = [[0] * 3 for _ in range(3)]
    for i in range(3):
        d = nrd(basis[i])
        if d.denominator != 1:
            raise ValueError(f"nrd of basis vector {i} is not integral: {d}")
        gram[i][i] = int(d)
    for i in range(3):
        for j in range(i + 1, 3):
            s = 2 * polarization(basis[i], basis[j])
            if s.denominator != 1:
                raise ValueError("polarization is not half-integral")
            gram[i][j] = gram[j][i] = int(s)
    try:
        return TernaryForm(gram)
    except ValueError as exc:
        raise ValueError(f"degenerate or indefinite basis: {exc}") from exc


def _axes_by_diag(t) -> tuple[int, int, int]:
    """Axis order (outer, middle, inner) with the smallest diagonal innermost."""
    order = sorted(range(3), key=lambda i: t[i][i], reverse=True)
    return order[0], order[1], order[2]


def _sweep_ranges(form: TernaryForm, bound: int):
    """Yield (x_axis_val, y_axis_val, inner coefficients) covering value <= bound.

    Exact integer bound derivation: the outer bound comes from the inverse
    Gram diagonal, the middle from the Schur complement over the inner
    variable.  Both carry one unit of slack; the inner loop filters exactly.
    """
    t = form._twice
    o1, o2, it = _axes_by_diag(t)
    det = _det3(t)
    # |v_{o1}|^2 <= 2*bound*cof_{o1o1}/det
    b1 = isqrt(2 * bound * _cofactor_diag(t, o1) // det) + 1
    tii = t[it][it]
    alpha = tii * t[o2][o2] - t[it][o2] ** 2
    beta = 2 * (tii * t[o1][o2] - t[it][o1] * t[it][o2])
    gamma = tii * t[o1][o1] - t[it][o1] ** 2
    for x in range(-b1, b1 + 1):
        disc = beta * beta * x * x - 4 * alpha * (gamma * x * x - 2 * bound * tii)
        if disc < 0:
            continue
        s = isqrt(disc)
        lo = (-beta * x - s) // (2 * alpha) - 1
        hi = (-beta * x + s) // (2 * alpha) + 2
        for y in range(lo, hi):
            # inner quadratic: (tii*v^2 + 2*L*v + R)/2 with v the inner variable
            L = t[it][o1] * x + t[it][o2] * y
            R = t[o1][o1] * x * x + 2 * t[o1][o2] * x * y + t[o2][o2] * y * y
            yield x, y, tii, L, R


def count_reps(form: TernaryForm, m: int) -> int:
    """Exact number of integer triples v with value(v) = m."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return 1
    count = 0
    for _x, _y, tii, L, R in _sweep_ranges(form, m):
        disc = L * L - tii * (R - 2 * m)
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        if (-L + s) % tii == 0:
            count += 1
        if s != 0 and (-L - s) % tii == 0:
            count += 1
    return count


def reps_histogram(form: TernaryForm, max_value: int) -> np.ndarray:
    """hist[m] = count_reps(form, m) for 0 <= m <= max_value, one lattice sweep."""
    if max_value < 0:
        raise ValueError("max_value must be nonnegative")
    hist = np.zeros(max_value + 1, dtype=np.int64)
    for _x, _y, tii, L, R in _sweep_ranges(form, max_value):
        disc = L * L - tii * (R - 2 * max_value)
        if disc < 0:
            continue
        s = isqrt(disc)
        lo = (-L - s) // tii - 1
        hi = (-L + s) // tii + 2
        v = np.arange(lo, hi, dtype=np.int64)
        vals = (tii * v * v + 2 * L * v + R) >> 1
        vals = vals[vals <= max_value]
        np.add.at(hist, vals, 1)
    return hist
