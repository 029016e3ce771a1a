"""The weight-12 eta-quotient vanishing to maximal order at infinity."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import prod

from . import linalg
from .etaquot import EtaQuotient, certify, order_matrix, prime_power_order_matrix
from .numth import divisors, factorize, psi

S1_PRIMES = (2, 3, 5, 7, 13)
S2_FIRST = (2, 3, 5)
S2_SECOND = (3, 5, 7, 13)
S3_SECOND = (3, 5)
S3_THIRD = (5, 7, 13)


class Status(str, Enum):
    EXISTS = "EtaQuotientExists"
    NON_INTEGRAL = "NonIntegralSolution"


@dataclass(frozen=True)
class Classification:
    kind: str  # "S1", "S2" or "S3"
    primes: tuple[int, ...]
    exponents: tuple[int, ...]

    @property
    def level(self) -> int:
        return prod(p**e for p, e in zip(self.primes, self.exponents))

    def to_json(self) -> dict:
        return {"set": self.kind, "primes": list(self.primes), "exponents": list(self.exponents)}


@dataclass(frozen=True)
class MaxVanishResult:
    level: int
    status: Status
    solution: tuple[Fraction, ...]
    eta_quotient: EtaQuotient | None
    classification: Classification | None

    @property
    def exists(self) -> bool:
        return self.status is Status.EXISTS

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "status": self.status.value,
            "classification": self.classification.to_json() if self.classification else None,
            "exponents": {str(d): str(r) for d, r in zip(divisors(self.level), self.solution)},
        }
        if self.eta_quotient is not None:
            out["orderAtInfinity"] = str(self.eta_quotient.order_at_infinity())
        return out


def classify(n: int) -> Classification | None:
    """Membership of ``n`` in the three families of levels with an eta-quotient answer."""
    fac = factorize(n)
    ps = tuple(p for p, _ in fac)
    es = tuple(e for _, e in fac)
    if len(ps) == 1 and ps[0] in S1_PRIMES:
        return Classification("S1", ps, es)
    if len(ps) == 2:
        p1, p2 = ps
        if p1 in S2_FIRST and p2 in S2_SECOND and p1 * p2 < 40:
            return Classification("S2", ps, es)
    if len(ps) == 3:
        p1, p2, p3 = ps
        if p1 == 2 and p2 in S3_SECOND and p3 in S3_THIRD and p2 + p3 < 17:
            return Classification("S3", ps, es)
    return None


def closed_form(c: Classification) -> EtaQuotient:
    """Exponents of the maximal-vanishing eta-quotient for a classified level.

    With base = prod p_i^(n_i - 1) and r = 24 / prod (p_i - 1), the divisor
    base * prod_{i in I} p_i carries (-1)^(s - |I|) * prod_{i in I} p_i * r.
    """
    s = len(c.primes)
    r = Fraction(24, prod(p - 1 for p in c.primes))
    if r.denominator != 1:
        raise ValueError(f"{c} does not give integral exponents")
    base = prod(p ** (e - 1) for p, e in zip(c.primes, c.exponents))
    exps = {}
    for size in range(s + 1):
        for sub in combinations(c.primes, size):
            step = prod(sub)
            exps[base * step] = (-1) ** (s - size) * step * int(r)
    return EtaQuotient(c.level, exps)


def solve_max_vanish(n: int) -> MaxVanishResult:
    """Solve A_N r = (0, ..., 0, index) exactly and decide whether r is an eta-quotient."""
    if n < 2:
        raise ValueError("maximal vanishing needs level >= 2")
    divs = divisors(n)
    rhs = [0] * (len(divs) - 1) + [psi(n)]
    sol = tuple(linalg.solve(order_matrix(n), rhs))
    cls = classify(n)
    eq = None
    status = Status.NON_INTEGRAL
    if all(x.denominator == 1 for x in sol):
        cand = EtaQuotient(n, {d: int(x) for d, x in zip(divs, sol)})
        cert = certify(cand)
        if cert.is_modular_form and cert.weight == 12:
            eq = cand
            status = Status.EXISTS
    return MaxVanishResult(level=n, status=status, solution=sol, eta_quotient=eq, classification=cls)


def max_vanishing_form(n: int) -> EtaQuotient:
    res = solve_max_vanish(n)
    if res.eta_quotient is None:
        raise ValueError(f"no weight-12 eta-quotient with maximal vanishing at infinity for N={n}")
    return res.eta_quotient


def inverse_order_matrix_prime_power(p: int, n: int) -> list[list[Fraction]]:
    """Exact inverse of the order matrix of level p^n, by elimination."""
    return linalg.inverse(prime_power_order_matrix(p, n))
