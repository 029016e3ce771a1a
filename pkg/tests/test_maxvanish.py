from fractions import Fraction

import pytest

from etaplane import linalg
from etaplane.etaquot import certify, divisor, order_matrix, prime_power_order_matrix
from etaplane.maxvanish import (
    Status, classify, closed_form, inverse_order_matrix_prime_power, max_vanishing_form, solve_max_vanish,
)
from etaplane.numth import divisors, factorize, psi


def test_level_13():
    res = solve_max_vanish(13)
    assert res.status is Status.EXISTS
    assert res.eta_quotient.exponents == {1: -2, 13: 26}
    assert res.eta_quotient.order_at_infinity() == 14
    assert res.classification.kind == "S1"


def test_level_11_not_integral():
    res = solve_max_vanish(11)
    assert res.status is Status.NON_INTEGRAL
    assert res.solution == (Fraction(-12, 5), Fraction(132, 5))
    assert res.to_json()["status"] == "NonIntegralSolution"
    # direct 2x2 check: A r = (0, 12) with A = [[11, 1], [1, 11]] / 24
    a, b = res.solution
    assert 11 * a + b == 0 and a + 11 * b == 24 * 12


def test_classification_examples():
    assert classify(2 ** 5).kind == "S1"
    assert classify(56).kind == "S2"
    assert classify(2 * 3 * 7).kind == "S3"
    assert classify(2 * 5 * 7).kind == "S3"
    assert classify(2 * 5 * 13) is None  # 5 + 13 too large
    assert classify(3 * 13).kind == "S2"
    assert classify(5 * 7).kind == "S2"
    assert classify(5 * 13) is None
    assert classify(2 * 3 * 5 * 7) is None
    assert classify(11) is None


def test_classification_sets_by_enumeration():
    allowed_s1 = {2, 3, 5, 7, 13}
    for n in range(2, 401):
        fs = factorize(n)
        ps = [p for p, _ in fs]
        c = classify(n)
        if len(ps) == 1:
            assert (c is not None) == (ps[0] in allowed_s1)
        elif len(ps) == 2:
            ok = ps[0] in (2, 3, 5) and ps[1] in (3, 5, 7, 13) and ps[0] * ps[1] < 40
            assert (c is not None) == ok, n
        elif len(ps) == 3:
            ok = ps[0] == 2 and ps[1] in (3, 5) and ps[2] in (5, 7, 13) and ps[1] + ps[2] < 17
            assert (c is not None) == ok, n
        else:
            assert c is None


@pytest.mark.parametrize("n", [4, 8, 9, 16, 27, 56, 42, 60, 90, 140])
def test_solution_solves_the_system(n):
    res = solve_max_vanish(n)
    a = order_matrix(n)
    orders = [sum(x * r for x, r in zip(row, res.solution)) for row in a]
    assert orders == [0] * (len(orders) - 1) + [psi(n)]


def test_max_vanishing_form_properties():
    for n in (2, 4, 9, 12, 56, 60):
        f = max_vanishing_form(n)
        assert certify(f).is_modular_form
        assert sum(f.exponents.values()) == 24
        assert sum((n // d) * r for d, r in f.exponents.items()) == 0
        div = divisor(f)
        assert div.by_denominator[n] == psi(n)
        assert all(v == 0 for d, v in div.by_denominator.items() if d != n)


def test_closed_form_for_prime_powers():
    # r = 24 / (p - 1); exponents -r p^{n-1} at p^{n-1} and r p^n at p^n
    for p, e in [(2, 3), (3, 2), (5, 1), (7, 2), (13, 1)]:
        f = closed_form(classify(p ** e))
        r = 24 // (p - 1)
        nonzero = {d: x for d, x in f.exponents.items() if x}
        assert nonzero == {p ** (e - 1): -r, p ** e: r * p}


def test_inverse_prime_power_against_elimination():
    for p in (2, 3, 5, 7):
        for n in range(1, 6):
            a = prime_power_order_matrix(p, n)
            assert inverse_order_matrix_prime_power(p, n) == linalg.inverse(a)


def test_inverse_prime_power_boundary_rows():
    # first and last rows have two nonzero entries
    for p in (2, 3, 5):
        for n in range(2, 6):
            inv = inverse_order_matrix_prime_power(p, n)
            c = Fraction(24, p ** (n - 1) * (p * p - 1))
            assert inv[0][:2] == [c * p, -c * p]
            assert all(x == 0 for x in inv[0][2:])
            assert inv[n][n - 1:] == [-c * p, c * p]
            if n >= 4:
                assert inv[1][:3] == [-c, c * (p * p + 1), -c * p * p]
                assert all(x == 0 for x in inv[1][3:])
                assert inv[n - 1][n - 2:] == [-c * p * p, c * (p * p + 1), -c]


def test_requires_level_two_or_more():
    with pytest.raises(ValueError):
        solve_max_vanish(1)
