"""Exact linear algebra over Q (fraction-free) and over small prime fields."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

Number = int | Fraction

# primes below 2**31, so products of two residues fit in int64
_PRIME_START = 2**31 - 1


def clear_denominators(row: Sequence[Number]) -> list[int]:
    den = 1
    for x in row:
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    return [int(x * den) for x in row]


def primitive(vec: Sequence[Number]) -> list[int]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    ints = clear_denominators(vec)
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def bareiss_echelon(rows: Sequence[Sequence[Number]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Returns the echelon rows (only the first ``rank`` rows are nonzero) and the
    pivot columns. Entries stay integral: every step divides exactly by the
    previous pivot.
    """
    m = [clear_denominators(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    nrows = len(m)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        a = pr[c]
        for i in range(r + 1, nrows):
            row = m[i]
            b = row[c]
            if b == 0:
                if a != prev:
                    m[i] = [(a * x) // prev for x in row]
                continue
            m[i] = [(a * x - b * y) // prev for x, y in zip(row, pr)]
        # entries left of c in rows below are zero already
        prev = a
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(bareiss_echelon(rows)[1])


def _back_substitute(ech: list[list[int]], pivots: list[int], ncols: int, free: dict[int, Fraction]) -> list[Fraction]:
    x: list[Fraction] = [Fraction(0)] * ncols
    for c, v in free.items():
        x[c] = v
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        row = ech[i]
        s = Fraction(0)
        for j in range(c + 1, ncols):
            if row[j] and x[j]:
                s += row[j] * x[j]
        x[c] = -s / row[c]
    return x


def nullspace(rows: Sequence[Sequence[Number]], ncols: int | None = None) -> list[list[int]]:
    """Basis of the right kernel, as primitive integer vectors.

    One basis vector per non-pivot column, with that column set to 1 before
    clearing denominators.
    """
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    ech, pivots = bareiss_echelon(rows)
    pivset = set(pivots)
    basis = []
    for c in range(ncols):
        if c in pivset:
            continue
        x = _back_substitute(ech, pivots, ncols, {c: Fraction(1)})
        basis.append(primitive(x))
    return basis


def solve(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> list[Fraction]:
    """Solve a square nonsingular system exactly."""
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    # scale the whole row so that clearing denominators keeps rhs consistent
    aug = [clear_denominators(r) for r in aug]
    ech, pivots = bareiss_echelon(aug)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise ZeroDivisionError("matrix is singular")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = ech[i]
        s = Fraction(row[n])
        for j in range(i + 1, n):
            if row[j]:
                s -= row[j] * x[j]
        x[i] = s / row[i]
    return x


def inverse(matrix: Sequence[Sequence[Number]]) -> list[list[Fraction]]:
    n = len(matrix)
    cols = [solve(matrix, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> list[list[Number]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def kron(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> list[list[Number]]:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


# --- prime fields ----------------------------------------------------------

def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_below(start: int = _PRIME_START):
    """Yield primes in decreasing order starting at ``start``."""
    n = start
    while n > 2:
        if _is_probable_prime(n):
            yield n
        n -= 1


def reduce_mod(rows: Sequence[Sequence[Number]], p: int) -> np.ndarray:
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=np.int64)
    for i, row in enumerate(rows):
        out[i] = [_mod(x, p) for x in row]
    return out


def _mod(x: Number, p: int) -> int:
    if isinstance(x, Fraction):
        return x.numerator % p * pow(x.denominator % p, -1, p) % p
    return x % p


def echelon_mod(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p); ``m`` holds residues in [0, p)."""
    m = m.copy()
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r, c:] = m[r, c:] * inv % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            m[np.ix_(hit, np.arange(c, ncols))] = (
                m[np.ix_(hit, np.arange(c, ncols))] - np.outer(col[hit], m[r, c:]) % p
            ) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod(m: np.ndarray, p: int) -> int:
    return len(echelon_mod(m, p)[1])


def nullspace_mod(m: np.ndarray, p: int) -> list[np.ndarray]:
    """Kernel basis over GF(p), one vector per free column (that entry = 1)."""
    nrows, ncols = m.shape
    red, pivots = echelon_mod(m, p)
    pivset = set(pivots)
    basis = []
    for c in range(ncols):
        if c in pivset:
            continue
        v = np.zeros(ncols, dtype=np.int64)
        v[c] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-red[i, c]) % p
        basis.append(v)
    return basis


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Find n/d = a mod m with |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)
