"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are echoed in the terminal summary of every pytest run. Criteria 4
and 5 carry the ``slow`` marker so they can be deselected with -m "not slow";
the N=56 pole degrees are checked in a separate, fast test.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from etaplane import linalg
from etaplane.etaquot import (
    EtaQuotient, certify, delta, delta_scaled, divisor, kronecker_order_matrix, order_matrix,
)
from etaplane.maxvanish import classify, closed_form, solve_max_vanish
from etaplane.numth import cusp_count, divisors, factorize, profile, psi
from etaplane.planemodel import (
    PlanePolynomial, conic_triple, gcd_birationality_check, model_report, pole_degree, relation_at_degree,
    standard_triple,
)
from etaplane.maxvanish import max_vanishing_form
from etaplane.qseries import eta_power, euler_product

REFERENCE_CURVES = {
    2: "x0*x1 - x2^2",
    3: "x0^2*x1 - x2^3",
    4: "x0^3*x1^2 + 4096*x0^3*x1*x2 + 48*x0^2*x1*x2^2 - x2^5",
    5: "x0^4*x1 - x2^5",
    7: "x0^6*x1 - x2^7",
    9: (
        "x0^8*x1^3 + 531441*x0^8*x1^2*x2 + 282429536481*x0^8*x1*x2^2 + 27894275208*x0^7*x1*x2^3"
        " - 756*x0^6*x1^2*x2^3 + 975725676*x0^6*x1*x2^4 + 14171760*x0^5*x1*x2^5 + 74358*x0^4*x1*x2^6"
        " + 72*x0^3*x1*x2^7 - x2^11"
    ),
    13: "x0^12*x1 - x2^13",
}


@contextmanager
def criterion(label: str, budget: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed <= budget
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over budget {budget:.0f}s)"
        line = f"[{status}] {label}  {elapsed:.1f}s{note}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert within, f"{label} took {elapsed:.1f}s, budget {budget:.0f}s"


def _closure(report) -> bool:
    prof = profile(report.triple.level)
    lhs = report.map_degree * report.curve_degree + report.min_divisor_sum
    return lhs == prof.dim_m12 + prof.genus - 1 == psi(report.triple.level)


def test_criterion_1_reference_curves():
    with criterion("1 reference curves, N in {2,3,4,5,7,9,13}", 120):
        for n, text in REFERENCE_CURVES.items():
            rep = model_report(standard_triple(n))
            assert rep.curve.equal_up_to_sign(PlanePolynomial.parse(text)), n
            assert _closure(rep)


def test_criterion_2_conics():
    with criterion("2 conic triples for p in {3,5,7,11,13}", 30):
        for p in (3, 5, 7, 11, 13):
            rep = model_report(conic_triple(p))
            assert rep.curve.equal_up_to_sign(PlanePolynomial.parse("x1^2 - x0*x2"))
            assert rep.map_degree == (p - 1) // 2
            prec = 2 * psi(p) + 10
            g = eta_power(1, 12, prec) * eta_power(p, 12, prec)
            ident = g * g - eta_power(1, 24, prec) * eta_power(p, 24, prec)
            assert ident.bound >= prec and ident.is_zero()


def test_criterion_3_max_vanishing():
    with criterion("3 maximal vanishing: existence and completeness, N <= 400", 60):
        allowed = {2, 3, 5, 7, 13}
        exists = complete = 0
        for n in range(2, 401):
            cls = classify(n)
            res = solve_max_vanish(n)
            if cls is not None:
                assert res.exists
                assert res.eta_quotient == closed_form(cls)
                assert certify(res.eta_quotient).is_modular_form
                orders = divisor(res.eta_quotient).by_denominator
                assert orders[n] == psi(n) and all(v == 0 for d, v in orders.items() if d != n)
                exists += 1
            elif {p for p, _ in factorize(n)} <= allowed:
                assert not res.exists
                assert any(x.denominator != 1 for x in res.solution)
                complete += 1
        assert exists > 0 and complete > 0


def test_criterion_4_pole_degrees_level_56():
    with criterion("4a N=56 pole degrees 95 and 40, gcd 5", 30):
        f = max_vanishing_form(56)
        assert pole_degree(delta(56), f) == 95
        assert pole_degree(delta_scaled(56), f) == 40
        cert = gcd_birationality_check(standard_triple(56))
        assert cert.gcd == 5 and not cert.birational


@pytest.mark.slow
def test_criterion_4_model_level_56():
    with criterion("4b N=56 full model, map degree 1", 1800):
        tr = standard_triple(56)
        rep = model_report(tr)
        assert rep.map_degree == 1 and rep.curve_degree == 95
        assert _closure(rep)
        # Pole degrees 95 and 40 alone leave map degree 5 (curve degree 19) open.
        # Rule it out directly: no degree-19 relation among all monomials.
        mons = [(19 - j - k, j, k) for j in range(20) for k in range(20 - j)]
        step, _, _ = relation_at_degree(tr, 19, mons, method="modular")
        assert step.nullity == 0


def _coprime_pole_levels():
    prime_powers = [4, 8, 9, 16, 25, 27, 49, 169]
    two_primes = []
    for p, q in ((2, 3), (2, 5), (2, 13), (3, 5)):
        for a in range(1, 9):
            for b in range(1, 9):
                if p**a * q**b <= 400:
                    two_primes.append(p**a * q**b)
    three_primes = [2**a * 3**b * 7**c for a in range(1, 9) for b in range(1, 6) for c in range(1, 4) if 2**a * 3**b * 7**c <= 400]
    return prime_powers, sorted(two_primes), sorted(three_primes)


@pytest.mark.slow
def test_criterion_5_birationality():
    prime_powers, two_primes, three_primes = _coprime_pole_levels()
    levels = prime_powers + two_primes + three_primes
    with criterion(f"5 gcd certificates for {len(levels)} levels, models for N <= 60", 900):
        for n in levels:
            assert gcd_birationality_check(standard_triple(n)).birational, n
        for n in sorted(x for x in levels if x <= 60):
            rep = model_report(standard_triple(n))
            assert rep.curve_degree == psi(n) - 1, n
            assert rep.map_degree == 1, n
            assert _closure(rep)


def test_criterion_6_structural_identities():
    with criterion("6 structural identities", 120):
        for tr in [standard_triple(n) for n in (2, 3, 4, 6, 8, 9, 10, 12, 16)] + [conic_triple(p) for p in (3, 5, 7)]:
            assert _closure(model_report(tr))
        rng = random.Random(6)
        for _ in range(200):
            n = rng.randint(1, 120)
            f = EtaQuotient(n, {d: rng.randint(-48, 48) for d in divisors(n)})
            a = order_matrix(n)
            assert [sum(x * r for x, r in zip(row, f.vector())) for row in a] == [f.order_at(d) for d in divisors(n)]
        for n in range(1, 121):
            perm, kron = kronecker_order_matrix(n)
            divs = divisors(n)
            idx = [divs.index(d) for d in perm]
            direct = order_matrix(n)
            assert kron == [[direct[i][j] for j in idx] for i in idx]
        # every certified weight-12 eta-quotient met here has divisor degree Psi(N)
        for n in range(2, 121):
            forms = [delta_scaled(n, d) for d in divisors(n)]
            if classify(n):
                forms.append(max_vanishing_form(n))
            for p in (5, 7, 13):
                if n % p == 0:
                    forms.append(EtaQuotient(n, {1: 12, p: 12}))
            for f in forms:
                cert = certify(f)
                assert cert.is_modular_form and cert.weight == 12
                assert divisor(f).degree() == psi(n)
        for n in range(2, 401):
            if classify(n):
                f = max_vanishing_form(n)
                assert sum(f.exponents.values()) == 24
                assert sum((n // d) * r for d, r in f.exponents.items()) == 0


def test_criterion_7_q_expansions():
    with criterion("7 q-expansion pins", 5):
        d = eta_power(1, 24, 10)
        assert [d[1], d[2], d[3]] == [1, -24, 252]
        # the next coefficient against the pentagonal expansion raised to the 24th power
        e = list(euler_product(6))
        acc = [1, 0, 0, 0, 0, 0]
        for _ in range(24):
            acc = [sum(acc[i] * e[k - i] for i in range(k + 1)) for k in range(6)]
        assert d[4] == acc[3]
        for p in (5, 7):
            s = eta_power(1, 12, 20) * eta_power(p, 12, 20)
            assert list(s.coeffs[:5]) == [1, -12, 54, -88, -99]
