"""Eta-quotients on Gamma_0(N): cusp orders, modularity conditions, expansions."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping

from . import linalg
from .numth import Cusp, cusp_count, cusps, divisors, factorize, psi
from .qseries import QSeries, eta_power, one


class NotModularError(ValueError):
    """Raised when an operation needs a holomorphic modular form."""


@dataclass(frozen=True)
class EtaQuotient:
    """``prod_{delta | N} eta(delta z)^{r_delta}`` at level ``N``.

    ``exponents`` always carries every divisor of ``N`` as a key.
    """

    level: int
    exponents: Mapping[int, int] = field(hash=False)

    def __init__(self, level: int, exponents: Mapping[int, int] | None = None):
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        exps = {d: 0 for d in divisors(level)}
        for d, r in (exponents or {}).items():
            d, r = int(d), int(r)
            if d not in exps:
                raise ValueError(f"{d} does not divide the level {level}")
            exps[d] = r
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "exponents", exps)

    def __hash__(self) -> int:
        return hash((self.level, tuple(self.exponents.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EtaQuotient):
            return NotImplemented
        return self.level == other.level and self.exponents == other.exponents

    def vector(self) -> list[int]:
        return [self.exponents[d] for d in divisors(self.level)]

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(self.exponents.values()), 2)

    def order_at(self, d: int) -> Fraction:
        """Order of vanishing at every cusp with denominator ``d`` (Ligozat)."""
        n = self.level
        if n % d:
            raise ValueError(f"{d} does not divide the level {n}")
        s = sum(Fraction(gcd(delta, d) ** 2 * r, delta) for delta, r in self.exponents.items() if r)
        return Fraction(n, 24 * gcd(n, d * d)) * s

    def orders(self) -> dict[int, Fraction]:
        return {d: self.order_at(d) for d in divisors(self.level)}

    def order_at_infinity(self) -> Fraction:
        return self.order_at(self.level)

    def at_level(self, m: int) -> EtaQuotient:
        """The same function regarded at a multiple level ``m``."""
        if m % self.level:
            raise ValueError(f"{m} is not a multiple of {self.level}")
        return EtaQuotient(m, {d: r for d, r in self.exponents.items() if r})

    def q_expansion(self, precision: int) -> QSeries:
        out = one(precision)
        for delta, r in self.exponents.items():
            if r:
                out = out * eta_power(delta, r, precision)
        return out

    def __mul__(self, other: EtaQuotient) -> EtaQuotient:
        if other.level != self.level:
            raise ValueError("levels differ")
        return EtaQuotient(self.level, {d: self.exponents[d] + other.exponents[d] for d in self.exponents})

    def __truediv__(self, other: EtaQuotient) -> EtaQuotient:
        if other.level != self.level:
            raise ValueError("levels differ")
        return EtaQuotient(self.level, {d: self.exponents[d] - other.exponents[d] for d in self.exponents})

    def __str__(self) -> str:
        return format_expression(self)

    def to_json(self) -> dict:
        return {"level": self.level, "exponents": {str(d): r for d, r in self.exponents.items() if r}}

    @classmethod
    def from_json(cls, data: Mapping) -> EtaQuotient:
        return cls(int(data["level"]), {int(d): int(r) for d, r in data["exponents"].items()})


def delta(level: int) -> EtaQuotient:
    """Ramanujan's Delta, ``eta(z)^24``, viewed at ``level``."""
    return EtaQuotient(level, {1: 24})


def delta_scaled(level: int, m: int | None = None) -> EtaQuotient:
    """``Delta(m z) = eta(m z)^24`` at ``level`` (``m`` defaults to the level)."""
    return EtaQuotient(level, {level if m is None else m: 24})


_TERM = re.compile(r"eta\((\d+)\)(?:\^(?:\((-?\d+)\)|(-?\d+)))?")


def parse_expression(text: str, level: int) -> EtaQuotient:
    """Parse ``"eta(1)^-2 * eta(13)^26"``; repeated factors accumulate."""
    src = re.sub(r"\s+", "", text)
    if src in ("", "1"):
        return EtaQuotient(level)
    exps: dict[int, int] = {}
    for part in src.split("*"):
        m = _TERM.fullmatch(part)
        if not m:
            raise ValueError(f"cannot parse eta factor {part!r}")
        d = int(m.group(1))
        r = int(m.group(2) or m.group(3) or 1)
        if d < 1 or level % d:
            raise ValueError(f"eta({d}) is not a factor at level {level}")
        exps[d] = exps.get(d, 0) + r
    return EtaQuotient(level, exps)


def format_expression(f: EtaQuotient) -> str:
    parts = [f"eta({d})^{r}" if r != 1 else f"eta({d})" for d, r in f.exponents.items() if r]
    return " * ".join(parts) if parts else "1"


# --- order matrix ---------------------------------------------------------

def order_matrix(n: int) -> list[list[Fraction]]:
    """Rows indexed by cusp denominators d, columns by delta, both ascending."""
    divs = divisors(n)
    return [[Fraction(n * gcd(delta, d) ** 2, 24 * gcd(n, d * d) * delta) for delta in divs] for d in divs]


def prime_power_order_matrix(p: int, e: int) -> list[list[Fraction]]:
    """Order matrix of level p^e; row i is the denominator p^i, column j is p^j."""
    n = p**e
    return [
        [Fraction(n, 24 * p ** (abs(i - j) + min(i, e - i))) for j in range(e + 1)]
        for i in range(e + 1)
    ]


def mixed_radix_divisors(n: int) -> list[int]:
    """Divisors of ``n`` in the order induced by a Kronecker product over prime powers."""
    out = [1]
    for p, e in factorize(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return out


def kronecker_order_matrix(n: int) -> tuple[list[int], list[list[Fraction]]]:
    """Order matrix assembled as a Kronecker product, with its divisor ordering.

    The factor 1/24 appears once in the level-N matrix but once per block in a
    product of prime-power matrices, so the blocks are multiplied by 24 first.
    """
    mat: list[list[Fraction]] = [[Fraction(1)]]
    for p, e in factorize(n):
        block = [[24 * x for x in row] for row in prime_power_order_matrix(p, e)]
        mat = linalg.kron(mat, block)
    return mixed_radix_divisors(n), [[x / 24 for x in row] for row in mat]


# --- modularity -------------------------------------------------------------

@dataclass(frozen=True)
class ModularityCertificate:
    level: int
    weight: Fraction
    conditions: dict[str, bool]

    @property
    def failing(self) -> list[str]:
        return [k for k, ok in self.conditions.items() if not ok]

    @property
    def is_weakly_modular(self) -> bool:
        return all(ok for k, ok in self.conditions.items() if k != "holomorphic")

    @property
    def is_modular_form(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": str(self.weight),
            "conditions": self.conditions,
            "failing": self.failing,
            "isWeaklyModular": self.is_weakly_modular,
            "isModularForm": self.is_modular_form,
        }


def _square_exponents(f: EtaQuotient) -> dict[int, int]:
    """Prime exponents of prod (N/delta)^{r_delta}."""
    acc: dict[int, int] = {}
    for d, r in f.exponents.items():
        if not r:
            continue
        for p, e in factorize(f.level // d):
            acc[p] = acc.get(p, 0) + e * r
    return acc


def certify(f: EtaQuotient) -> ModularityCertificate:
    n = f.level
    ex = f.exponents
    conds = {
        "weight_integral": sum(ex.values()) % 2 == 0,
        "infinity_mod_24": sum(d * r for d, r in ex.items()) % 24 == 0,
        "zero_mod_24": sum((n // d) * r for d, r in ex.items()) % 24 == 0,
        "square": all(e % 2 == 0 for e in _square_exponents(f).values()),
        "holomorphic": all(o >= 0 for o in f.orders().values()),
    }
    return ModularityCertificate(level=n, weight=f.weight, conditions=conds)


# --- divisors -------------------------------------------------------------

@dataclass(frozen=True)
class CuspDivisor:
    """Cuspidal divisor stored per cusp denominator."""

    level: int
    by_denominator: dict[int, Fraction]

    def order(self, c: Cusp) -> Fraction:
        return self.by_denominator[c.d]

    def per_cusp(self) -> dict[Cusp, Fraction]:
        return {c: self.by_denominator[c.d] for c in cusps(self.level)}

    def degree(self) -> Fraction:
        return sum(
            (cusp_count(self.level, d) * o for d, o in self.by_denominator.items()), Fraction(0)
        )

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "orders": {str(c): str(o) for c, o in self.per_cusp().items()},
            "degree": str(self.degree()),
        }


def divisor(f: EtaQuotient) -> CuspDivisor:
    cert = certify(f)
    if not cert.is_modular_form:
        raise NotModularError(f"{f} fails {', '.join(cert.failing)} at level {f.level}")
    return CuspDivisor(level=f.level, by_denominator=f.orders())


def expected_degree(level: int, weight: Fraction | int) -> Fraction:
    """Total divisor degree of a weight-k form on Gamma_0(level), k * index / 12."""
    return Fraction(weight) * psi(level) / 12


def from_vector(level: int, vec) -> EtaQuotient:
    return EtaQuotient(level, dict(zip(divisors(level), (int(x) for x in vec))))
