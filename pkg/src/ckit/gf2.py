"""GF(2) linear algebra on int bitsets (bit j of a row = column j)."""

from __future__ import annotations


def gf2_rank(rows: list[int]) -> int:
    """Rank via Gaussian elimination; does not modify the input."""
    work = [r for r in rows if r]
    rank = 0
    while work:
        pivot_row = min(work, key=lambda r: r & -r)
        pivot_bit = pivot_row & -pivot_row
        work = [r ^ pivot_row if r & pivot_bit else r for r in work]
        work = [r for r in work if r]
        rank += 1
    return rank


def gf2_solve(rows: list[int], rhs: list[int], n_cols: int):
    """Solve M x = b over GF(2).

    Returns (particular, basis) with particular an int bitset solution and
    basis a list of nullspace bitsets, or None if inconsistent.
    """
    aug = [(rows[i], rhs[i] & 1) for i in range(len(rows))]
    pivots: dict[int, tuple[int, int]] = {}
    for row, b in aug:
        for col in sorted(pivots):
            prow, pb = pivots[col]
            if row >> col & 1:
                row ^= prow
                b ^= pb
        if row:
            col = (row & -row).bit_length() - 1
            pivots[col] = (row, b)
        elif b:
            return None
    particular = 0
    for col in sorted(pivots, reverse=True):
        row, b = pivots[col]
        val = b
        rest = row & ~(1 << col)
        while rest:
            j = (rest & -rest).bit_length() - 1
            val ^= particular >> j & 1
            rest &= rest - 1
        particular |= val << col
    basis = []
    free_cols = [c for c in range(n_cols) if c not in pivots]
    for fc in free_cols:
        vec = 1 << fc
        for col in sorted(pivots, reverse=True):
            row, _ = pivots[col]
            parity = 0
            rest = row & ~(1 << col)
            while rest:
                j = (rest & -rest).bit_length() - 1
                parity ^= vec >> j & 1
                rest &= rest - 1
            vec |= parity << col
        basis.append(vec)
    return particular, basis


def gf2_span(generators: list[int]) -> set[int]:
    """All GF(2)-combinations of the given bitsets."""
    span = {0}
    for g in generators:
        if g not in span:
            span |= {s ^ g for s in span}
    return span
