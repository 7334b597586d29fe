"""Exact rational and integer linear algebra on small matrices.

Matrices are tuples of row tuples of :class:`fractions.Fraction` (or ints).
Everything here is exact; sizes are tiny (k, r <= ~6), so plain Gaussian
elimination is fine.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = tuple[tuple[Fraction, ...], ...]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # floats are taken at face value through their decimal repr
        return Fraction(repr(x))
    return Fraction(x)


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(to_fraction(v) for v in row) for row in rows)


def transpose(a: Matrix) -> Matrix:
    if not a:
        return ()
    return tuple(zip(*a))


def matvec(a: Matrix, v: Sequence) -> tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def rank(a: Matrix) -> int:
    return len(_echelon([list(r) for r in a])[1])


def _echelon(rows: list[list[Fraction]]):
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    pivots: list[int] = []
    if not rows:
        return rows, pivots
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    rows, pivots = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular rational matrix")
    return tuple(tuple(row[n:]) for row in rows)


def det(a: Matrix) -> Fraction:
    n = len(a)
    rows = [list(r) for r in a]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = -d
        d *= rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] / rows[c][c]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return d


def solve(a: Matrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """Exact solution x of a x = b, or None if inconsistent.

    ``a`` must have full column rank (solution unique when it exists).
    """
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [to_fraction(v)] for row, v in zip(a, b)]
    rows, pivots = _echelon(aug)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        raise ValueError("matrix lacks full column rank")
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][ncols]
    return tuple(x)


def hnf_rows(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form of an integer matrix; returns the nonzero rows.

    The rows form a Z-basis of the lattice generated by ``vectors``.
    """
    rows = [list(map(int, v)) for v in vectors]
    if not rows:
        return []
    ncols = len(rows[0])
    out_r = 0
    for c in range(ncols):
        # gcd-combine column c into row out_r
        while True:
            nz = [i for i in range(out_r, len(rows)) if rows[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][c]))
            rows[out_r], rows[piv] = rows[piv], rows[out_r]
            done = True
            for i in range(out_r + 1, len(rows)):
                if rows[i][c]:
                    q = rows[i][c] // rows[out_r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[out_r])]
                    if rows[i][c]:
                        done = False
            if done:
                break
        if out_r < len(rows) and rows[out_r][c] != 0:
            if rows[out_r][c] < 0:
                rows[out_r] = [-x for x in rows[out_r]]
            for i in range(out_r):
                q = rows[i][c] // rows[out_r][c]
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[out_r])]
            out_r += 1
            if out_r == len(rows):
                break
    return [tuple(r) for r in rows[:out_r] if any(r)]


def lattice_basis(vectors: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Z-basis of the additive group generated by rational vectors."""
    vecs = [tuple(to_fraction(x) for x in v) for v in vectors]
    if not vecs:
        return []
    den = 1
    for v in vecs:
        for x in v:
            den = lcm(den, x.denominator)
    ints = [[int(x * den) for x in v] for v in vecs]
    return [tuple(Fraction(x, den) for x in row) for row in hnf_rows(ints)]


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
