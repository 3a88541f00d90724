from fractions import Fraction as Q

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hullstats.exactnum import (SeriesError, TruncatedSeries as S, bigfloat, isqrt_fraction,
                                ps_exp_of_zero_const, ps_pow, ps_reverse, ps_sqrt,
                                rational_from_string)

small_q = st.builds(Q, st.integers(-20, 20), st.integers(1, 9))
coeff_lists = st.lists(small_q, min_size=6, max_size=6)


def test_rational_from_string():
    assert rational_from_string(" 3/8 ") == Q(3, 8)
    assert rational_from_string("0.5") == Q(1, 2)


def test_bigfloat_keeps_rationals_exact():
    with mpmath.workdps(50):
        x = bigfloat(Q(1, 3), 50)
        assert abs(x * 3 - 1) < mpmath.mpf(10) ** -49


def test_isqrt_fraction():
    assert isqrt_fraction(Q(49, 4)) == Q(7, 2)
    assert isqrt_fraction(Q(2)) is None
    assert isqrt_fraction(Q(-1)) is None


def test_index_beyond_order_raises():
    s = S([1, 2, 3])
    assert s[2] == 3
    with pytest.raises(IndexError):
        s[3]


def test_immutable():
    with pytest.raises(AttributeError):
        S([1]).order = 3


@given(coeff_lists, coeff_lists)
def test_mul_commutes_and_truncates(a, b):
    x, y = S(a), S(b)
    assert x * y == y * x
    # a factor vanishing to order v raises the known order of the product by v
    assert (x * y).order == min(6 + y.valuation(), 6 + x.valuation())


@given(coeff_lists)
def test_division_inverts_multiplication(a):
    if a[0] == 0:
        a[0] = Q(1)
    x = S(a)
    y = S([Q(2), Q(1), 0, Q(-3), 0, Q(1)])
    assert (y * x) / x == y


@given(coeff_lists)
@settings(max_examples=30)
def test_sqrt_squares_back(a):
    a[0] = Q(abs(a[0].numerator) + 1, abs(a[0].denominator)) ** 2
    x = S(a)
    r = ps_sqrt(x)
    assert r * r == x
    assert r[0] > 0


def test_sqrt_even_valuation():
    x = S([0, 0, 4, 4, 1, 0])
    r = ps_sqrt(x)
    assert r[1] == 2 and r[2] == 1 and r[0] == 0


def test_sqrt_odd_valuation_raises():
    with pytest.raises(SeriesError):
        ps_sqrt(S([0, 1, 1]))


def test_rational_power_matches_repeated_root():
    x = S([1, Q(1, 2), Q(-1, 3), Q(2), 0, Q(1, 7)])
    assert ps_pow(x, Q(3, 2)) == ps_sqrt(x) ** 3
    assert ps_pow(x, Q(-1)) * x == S([1], 6)


@given(st.lists(small_q, min_size=5, max_size=5))
@settings(max_examples=30)
def test_reversion_round_trip(tail):
    s = S([0, Q(2)] + tail[:4])
    r = ps_reverse(s)
    assert s(r) == S.variable(6)
    assert r(s) == S.variable(6)


def test_reversion_needs_linear_term():
    with pytest.raises(SeriesError):
        ps_reverse(S([0, 0, 1]))


def test_exp_of_log_series():
    # exp(log(1 + t)) = 1 + t
    log1p = S([0] + [Q((-1) ** (n + 1), n) for n in range(1, 8)])
    assert ps_exp_of_zero_const(log1p) == S([1, 1], 8)


def test_bigfloat_coefficients_mix():
    with mpmath.workdps(40):
        x = S([mpmath.mpf(1), mpmath.mpf(1) / 3, 0, 0])
        y = x * Q(3)
        assert abs(y[1] - 1) < mpmath.mpf(10) ** -38


def test_nested_series_coefficients():
    inner = S([1, 1], 3)
    outer = S([inner, inner], 3)
    sq = outer * outer
    assert sq[1] == inner * inner * 2
