"""Tunnell's criterion and the combinatorial central-value formulas.

For positive square-free n let a = 1 (n odd) or 2 (n even) and let Sigma(n)
be the integer solutions of 2a*x^2 + y^2 + 8*z^2 = n/a.  The difference

    L(n) = #{solutions with z even} - #{solutions with z odd}

vanishes automatically for n = 5, 6, 7 mod 8; when L(n) != 0, n is certified
not to be a congruent number.  L(n)^2 also computes the normalized central
L-value of the twist ny^2 = x^3 - x, and the same value is reproduced by
three further signed lattice-count formulas (`central_ratio_genus`,
`central_ratio_theta`, `central_ratio_theta_prime`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import isqrt

import numpy as np

from .arith import is_squarefree
from .forms import TernaryForm, count_reps, reps_histogram


@dataclass(frozen=True)
class TunnellCount:
    n: int
    evens: int
    odds: int

    @property
    def L(self) -> int:
        return self.evens - self.odds


@dataclass(frozen=True)
class SignedCombo:
    """Signed combination of representation counts, evaluated at index_scale*n."""

    terms: tuple[tuple[TernaryForm, int], ...]
    index_scale: int

    def __post_init__(self):
        if not self.terms or any(c == 0 for _, c in self.terms):
            raise ValueError("combo needs nonempty terms with nonzero coefficients")

    def count_at(self, n: int) -> int:
        return sum(c * count_reps(f, self.index_scale * n) for f, c in self.terms)

    def counts_range(self, max_n: int) -> np.ndarray:
        """Signed counts at index_scale*n for all 0 <= n <= max_n, by histogram sweep."""
        s = self.index_scale
        out = np.zeros(max_n + 1, dtype=np.int64)
        for f, c in self.terms:
            out += c * reps_histogram(f, s * max_n)[:: s]
        return out


def _check_n(n: int) -> None:
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not is_squarefree(n):
        raise ValueError(f"n must be square-free, got {n}")


def tunnell_count(n: int) -> TunnellCount:
    """Count solutions of 2a*x^2 + y^2 + 8*z^2 = n/a, split by parity of z."""
    _check_n(n)
    a = 1 if n % 2 else 2
    rhs = n // a
    evens = odds = 0
    z = 0
    while 8 * z * z <= rhs:
        r1 = rhs - 8 * z * z
        mult_z = 1 if z == 0 else 2
        x = 0
        while 2 * a * x * x <= r1:
            y2 = r1 - 2 * a * x * x
            y = isqrt(y2)
            if y * y == y2:
                cnt = mult_z * (1 if x == 0 else 2) * (1 if y == 0 else 2)
                if z % 2 == 0:
                    evens += cnt
                else:
                    odds += cnt
            x += 1
        z += 1
    return TunnellCount(n, evens, odds)


def _diag(d1: int, d2: int, d3: int) -> TernaryForm:
    return TernaryForm([[d1, 0, 0], [0, d2, 0], [0, 0, d3]])


def tunnell_l_range(max_n: int) -> np.ndarray:
    """Array L[0..max_n] of Tunnell counts, computed by four histogram sweeps.

    Valid at every n >= 1 (odd n via the a=1 equation, even via a=2); callers
    normally restrict to square-free indices.
    """
    out = np.zeros(max_n + 1, dtype=np.int64)
    # odd n: all solutions of 2x^2+y^2+8z^2 = n; even-z ones are 2x^2+y^2+32w^2 = n
    h_all = reps_histogram(_diag(2, 1, 8), max_n)
    h_even = reps_histogram(_diag(2, 1, 32), max_n)
    odd_l = 2 * h_even - h_all
    idx = np.arange(max_n + 1)
    out[idx % 2 == 1] = odd_l[idx % 2 == 1]
    half = max_n // 2
    if half >= 1:
        g_all = reps_histogram(_diag(4, 1, 8), half)
        g_even = reps_histogram(_diag(4, 1, 32), half)
        even_l = 2 * g_even - g_all
        ev = idx[(idx % 2 == 0) & (idx // 2 <= half)]
        out[ev] = even_l[ev // 2]
    return out


def certify_noncongruent(n: int) -> bool:
    """True is a theorem-backed certificate that n is NOT congruent; False is inconclusive."""
    return tunnell_count(n).L != 0


def cn_predicted_congruent(n: int) -> bool:
    """Conjectural congruence prediction: L(n) == 0.  Not a certificate."""
    return tunnell_count(n).L == 0


def central_ratio_tunnell(n: int) -> Fraction:
    """Predicted L(1, E^(n)) * sqrt(n) / Omega as an exact rational."""
    c = tunnell_count(n)
    return Fraction(c.L * c.L, 16 if n % 2 else 8)


@lru_cache(maxsize=1)
def _lattice_data() -> dict:
    with resources.files("ckit.data").joinpath("lattices.json").open() as fh:
        return json.load(fh)


@lru_cache(maxsize=8)
def combo(name: str) -> SignedCombo:
    """Named lattice combination from the committed data file."""
    entry = _lattice_data()[name]
    terms = tuple(
        (TernaryForm(g), w)
        for g, w in zip(entry["grams"], entry["weights"])
        if w != 0
    )
    return SignedCombo(terms, entry["index_scale"])


def lattice_bases(name: str) -> list[list[list[int]]]:
    """Integer (i, j, k)-coordinates of the basis vectors behind a named combo."""
    return _lattice_data()[name]["bases"]


def central_ratio_genus(n: int) -> Fraction:
    """Central ratio from the two-lattice genus pairs; n = 1, 2, 3 mod 8 only."""
    _check_n(n)
    r = n % 8
    if r in (1, 3):
        d = combo("genus_odd").count_at(n)
        return Fraction(d * d, 16)
    if r == 2:
        d = combo("genus_even").count_at(n)
        return Fraction(2 * d * d, 16)
    raise ValueError(f"genus formula requires n = 1,2,3 mod 8, got n = {n}")


def _check_1_mod_8(n: int) -> None:
    _check_n(n)
    if n % 8 != 1:
        raise ValueError(f"formula requires n = 1 mod 8, got n = {n}")


def combo_theta(n: int) -> int:
    """Signed lattice count at n for the three-lattice genus (n = 1 mod 8)."""
    _check_1_mod_8(n)
    return combo("theta").count_at(n)


def combo_theta_prime(n: int) -> int:
    """Signed lattice count at 2n for the four-lattice genus (n = 1 mod 8)."""
    _check_1_mod_8(n)
    return combo("theta_prime").count_at(n)


def central_ratio_theta(n: int) -> Fraction:
    c = combo_theta(n)
    return Fraction(c * c, 16)


def central_ratio_theta_prime(n: int) -> Fraction:
    c = combo_theta_prime(n)
    return Fraction(c * c, 16)
