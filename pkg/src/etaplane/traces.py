"""Characteristic polynomial of h/f over C(g/f) from q-expansion residues.

Applies when g/f and h/f have all their poles at one cusp of width one (the
cusp at infinity), as for the standard triple. Put X = g/f and Y = h/f with
pole orders a and b. The conjugates of Y over C(X) are read off the single
place above X = infinity, and the power sums of the conjugates are

    Tr(Y^m) = sum_l c(m, l) X^l,   c(m, l) = -res_q( Y^m X^(-l-1) dX/dq ),

which only involve integer q-series. Newton's identities turn power sums into
the coefficients of the characteristic polynomial, of degree a in Y.
"""

from __future__ import annotations

from fractions import Fraction

from .etaquot import EtaQuotient
from .qseries import inverse_trunc, mul_trunc


def _poly_mul(a: list, b: list, deg: int) -> list:
    out = [0] * (deg + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if i + j > deg:
                break
            if y:
                out[i + j] += x * y
    return out


def characteristic_polynomial(f: EtaQuotient, g: EtaQuotient, h: EtaQuotient) -> dict[tuple[int, int], int | Fraction]:
    """Coefficients {(l, k): c} of sum c X^l Y^k, monic of degree a in Y."""
    vf, vg, vh = (int(e.order_at_infinity()) for e in (f, g, h))
    a, b = vf - vg, vf - vh
    if a <= 0 or b <= 0:
        raise ValueError("g/f and h/f must both have a pole at infinity")
    L = a * b + 1
    uf, ug, uh = (list(e.q_expansion(L).coeffs) for e in (f, g, h))
    finv = inverse_trunc(uf, L)
    xu = mul_trunc(ug, finv, L)
    yu = mul_trunc(uh, finv, L)
    # X = q^-a xu, so dX/dq = q^(-a-1) * sum (n - a) xu[n] q^n
    dx = [(n - a) * c for n, c in enumerate(xu)]
    xinv = inverse_trunc(xu, L)

    # v[l] holds xu^-(l+1) * dx; its index t stands for q^(a*l - 1 + t)
    v = []
    cur = mul_trunc(xinv, dx, L)
    for l in range(b + 1):
        v.append(cur)
        if l < b:
            cur = mul_trunc(cur, xinv, L - a * (l + 1))

    # power sums as polynomials in X of degree <= b*m/a
    power_sums: list[list[int]] = [[a]]
    ym = [1] + [0] * (L - 1)
    for m in range(1, a + 1):
        ym = mul_trunc(ym, yu, L)  # index i stands for q^(-b*m + i)
        coeffs = []
        for l in range(b * m // a + 1):
            top = b * m - a * l
            vl = v[l]
            s = 0
            for t in range(top + 1):
                s += ym[top - t] * vl[t]
            coeffs.append(-s)
        power_sums.append(coeffs)

    # Newton: m e_m = sum_{i=1..m} (-1)^(i-1) e_{m-i} p_i
    e: list[list] = [[1]]
    for m in range(1, a + 1):
        deg = b * m // a
        acc = [0] * (deg + 1)
        for i in range(1, m + 1):
            prod = _poly_mul(e[m - i], power_sums[i], deg)
            if i % 2:
                acc = [x + y for x, y in zip(acc, prod)]
            else:
                acc = [x - y for x, y in zip(acc, prod)]
        e.append([x // m if x % m == 0 else Fraction(x, m) for x in acc])

    out: dict[tuple[int, int], int | Fraction] = {}
    for m in range(a + 1):
        sign = -1 if m % 2 else 1
        for l, c in enumerate(e[m]):
            if c:
                out[(l, a - m)] = sign * c
    return out
