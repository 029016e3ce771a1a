from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from etaplane.qseries import (
    PrecisionError, QSeries, _schoolbook, eta_power, euler_product, inverse_trunc, linear_rank,
    mul_trunc, one, partition_numbers, pow_trunc,
)

ints = st.integers(-10**40, 10**40)


def naive_product_power(r, n):
    """prod_{m<n} (1 - q^m)^r by repeated polynomial multiplication."""
    out = [1] + [0] * (n - 1)
    for m in range(1, n):
        for _ in range(r):
            out = [out[i] - (out[i - m] if i >= m else 0) for i in range(n)]
    return out


def brute_partitions(n):
    # number of partitions of k into parts <= k, by the coin-change recurrence
    ways = [1] + [0] * (n - 1)
    for part in range(1, n):
        for k in range(part, n):
            ways[k] += ways[k - part]
    return ways


def test_euler_product_matches_naive():
    assert list(euler_product(60)) == naive_product_power(1, 60)


def test_partitions_match_brute_force():
    assert list(partition_numbers(80)) == brute_partitions(80)


def test_delta_coefficients():
    d = eta_power(1, 24, 12)
    assert d.valuation == 1
    assert [d[n] for n in (1, 2, 3)] == [1, -24, 252]
    # the fourth coefficient against an independent expansion
    assert d[4] == naive_product_power(24, 5)[3] == -1472


def test_eta12_eta_p12_leading_terms():
    for p in (5, 7):
        s = eta_power(1, 12, 40) * eta_power(p, 12, 40)
        assert s.valuation == (p + 1) // 2
        assert list(s.coeffs[:5]) == [1, -12, 54, -88, -99]


def test_eta_power_valuation_grid():
    s = eta_power(1, 1, 5)
    assert s.valuation == Fraction(1, 24)
    assert s.bound == Fraction(1, 24) + 5
    assert "q^(1/24)" in s.format()


@given(st.lists(ints, min_size=1, max_size=120), st.lists(ints, min_size=1, max_size=120), st.integers(1, 130))
def test_kronecker_agrees_with_schoolbook(a, b, n):
    assert mul_trunc(a, b, n) == _schoolbook(a, b, n)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=200), st.sampled_from([1, -1]))
def test_inverse_truncation(tail, lead):
    a = [lead] + tail
    n = len(a)
    assert mul_trunc(a, inverse_trunc(a, n), n) == [1] + [0] * (n - 1)


def test_inverse_with_rational_leading_coefficient():
    a = [2, 3, 5]
    inv = inverse_trunc(a, 3)
    assert inv[0] == Fraction(1, 2)
    assert mul_trunc(a, inv, 3) == [1, 0, 0]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=30), st.integers(0, 6))
def test_power_is_repeated_product(a, k):
    n = len(a)
    ref = [1] + [0] * (n - 1)
    for _ in range(k):
        ref = _schoolbook(ref, a, n)
    assert pow_trunc(a, k, n) == ref


def test_series_arithmetic_tracks_precision():
    d = eta_power(1, 24, 10)
    inv = d.inverse()
    assert inv.valuation == -1
    assert (d * inv) == one(10)
    prod = d * eta_power(1, 24, 4)
    assert prod.precision == 4
    with pytest.raises(PrecisionError):
        prod[2 + 4]


def test_cancellation_shifts_valuation():
    a = QSeries(0, [1, 2, 3, 4])
    b = QSeries(0, [1, 2, 0, 0])
    diff = a - b
    assert diff.valuation == 2
    assert diff.bound == 4
    assert diff.coeffs == (3, 4)


def test_large_power_round_trip():
    a = eta_power(1, -24, 300)
    b = eta_power(1, 24, 300)
    assert a * b == one(300)


def test_format_and_json():
    d = eta_power(1, 24, 5)
    assert d.format() == "q - 24*q^2 + 252*q^3 - 1472*q^4 + 4830*q^5 + O(q^6)"
    assert QSeries.from_json(d.to_json()) == d


@given(st.integers(-3, 3).map(lambda k: Fraction(k, 24)), st.lists(ints, min_size=1, max_size=10))
def test_json_round_trip(v, coeffs):
    s = QSeries(v, coeffs)
    assert QSeries.from_json(s.to_json()) == s


def test_linear_rank():
    rows = [eta_power(1, 24, 10), eta_power(2, 24, 10), eta_power(1, 24, 10) * 3]
    assert linear_rank(rows, 10) == 2
