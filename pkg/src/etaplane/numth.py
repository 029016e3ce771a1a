"""Integer helpers and the standard invariants of Gamma_0(N)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` as ``((p, e), ...)`` with ``p`` ascending."""
    if n < 1:
        raise ValueError(f"factorize needs a positive integer, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == ((n, 1),)


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple[int, ...]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def divisors(n: int) -> list[int]:
    """All positive divisors of ``n`` in increasing order."""
    return list(_divisors(n))


def euler_phi(n: int) -> int:
    return prod(p ** (e - 1) * (p - 1) for p, e in factorize(n))


def psi(n: int) -> int:
    """Dedekind's psi, the index of Gamma_0(n) in SL_2(Z)."""
    return prod(p ** (e - 1) * (p + 1) for p, e in factorize(n))


def kronecker_m1(p: int) -> int:
    """The character (-1/p), extended by 0 at p = 2."""
    if p == 2:
        return 0
    return 1 if p % 4 == 1 else -1


def kronecker_m3(p: int) -> int:
    """The character (-3/p), extended by 0 at p = 3."""
    if p == 3:
        return 0
    return 1 if p % 3 == 1 else -1


@dataclass(frozen=True, order=True)
class Cusp:
    """Cusp representative ``a/d`` of Gamma_0(N), with ``d | N``.

    Cusp infinity is ``1/N`` and the cusp 0 is ``0/1``.
    """

    d: int
    a: int

    def __str__(self) -> str:
        return f"{self.a}/{self.d}"


@lru_cache(maxsize=1024)
def _cusps(n: int) -> tuple[Cusp, ...]:
    out = []
    for d in _divisors(n):
        k = gcd(d, n // d)
        for a0 in range(k):
            if gcd(a0, k) != 1:
                continue
            a = a0
            while gcd(a, d) != 1:
                a += k
            out.append(Cusp(d=d, a=a))
    return tuple(sorted(out))


def cusps(n: int) -> list[Cusp]:
    """One representative per cusp class, ordered by denominator then numerator."""
    return list(_cusps(n))


def cusp_count(n: int, d: int) -> int:
    """Number of cusps of Gamma_0(n) with denominator ``d``."""
    return euler_phi(gcd(d, n // d))


def cusp_width(n: int, d: int) -> int:
    return n // (d * gcd(d, n // d))


@dataclass(frozen=True)
class Gamma0Profile:
    level: int
    index: int
    cusps: tuple[Cusp, ...]
    nu2: int
    nu3: int
    nu_inf: int
    genus: int
    dim_m12: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "index": self.index,
            "cusps": [str(c) for c in self.cusps],
            "nu2": self.nu2,
            "nu3": self.nu3,
            "nuInf": self.nu_inf,
            "genus": self.genus,
            "dimM12": self.dim_m12,
        }


def nu2(n: int) -> int:
    if n % 4 == 0:
        return 0
    return prod(1 + kronecker_m1(p) for p in prime_factors(n))


def nu3(n: int) -> int:
    if n % 9 == 0:
        return 0
    return prod(1 + kronecker_m3(p) for p in prime_factors(n))


def genus(n: int) -> int:
    ninf = sum(cusp_count(n, d) for d in _divisors(n))
    g = 1 + Fraction(psi(n), 12) - Fraction(nu2(n), 4) - Fraction(nu3(n), 3) - Fraction(ninf, 2)
    if g.denominator != 1 or g < 0:
        raise ArithmeticError(f"genus formula gave {g} at level {n}")
    return int(g)


@lru_cache(maxsize=1024)
def profile(n: int) -> Gamma0Profile:
    if n < 1:
        raise ValueError(f"level must be positive, got {n}")
    cs = _cusps(n)
    g = genus(n)
    index = psi(n)
    return Gamma0Profile(
        level=n,
        index=index,
        cusps=cs,
        nu2=nu2(n),
        nu3=nu3(n),
        nu_inf=len(cs),
        genus=g,
        # weight 12: dim M_12 + g - 1 equals the index
        dim_m12=index + 1 - g,
    )
