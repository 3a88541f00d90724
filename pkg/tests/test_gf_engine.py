from fractions import Fraction as Q

import mpmath
import pytest

from hullstats import finite_laws as fl
from hullstats import gf_engine as gf
from hullstats.enum_oracle import catalan


def test_F_coefficients_k1_are_rooted_counts():
    s = gf.F_series(1, 9)
    for N in range(1, 9):
        assert s[N] == 2 * 3**N * catalan(N) // (N + 2)
    assert [s[N] for N in range(1, 5)] == [2, 9, 54, 378]


def test_F_series_vanishes_below_k():
    # distance k needs at least k-1 faces; the first map is a path
    s = gf.F_series(4, 8)
    assert all(s[N] == 0 for N in range(3))
    assert s[3] == 1 and s[4] > 0


def test_G_coefficients_are_nonnegative_integers():
    t = gf.G_coeffs(4, 2, 4, 4)
    assert t.entries
    for v in t.entries.values():
        assert v > 0 and Q(v).denominator == 1


def test_G_at_alpha_one_sums_over_perimeter():
    t = gf.G_coeffs(3, 2, 3, 3)
    flat = t.at_alpha_one()
    for (n1, n2), v in flat.items():
        assert v == sum(t.get(n1, n2, ell) for ell in range(0, 4 * (n1 + n2) + 3))


@pytest.mark.parametrize("lam", [Q(1, 10), Q(1, 7)])
def test_operator_identity_residual_is_zero(lam):
    assert gf.check_propK(12, lam).is_zero()


@pytest.mark.parametrize("k", [3, 5, 8])
def test_F_singular_coefficient(k):
    exp = gf.singular_extract("F", k, order=8, precision=40)
    with mpmath.workdps(40):
        want = mpmath.mpf(fl.f3(k).numerator) / fl.f3(k).denominator
        assert abs(exp.singular - want) < mpmath.mpf(10) ** -25
        assert all(abs(v) < mpmath.mpf(10) ** -25 for v in exp.spurious_terms().values())


@pytest.mark.parametrize("k,d", [(5, 2), (7, 3)])
def test_G_singular_coefficient_is_h3_difference(k, d):
    exp = gf.singular_extract("G", k, d, order=8, precision=40)
    want = fl.h3(k - d, 2 * d + 3) - fl.h3(k - d, 2 * d + 1)
    with mpmath.workdps(40):
        assert abs(exp.singular - mpmath.mpf(want.numerator) / want.denominator) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("k,d", [(5, 2), (9, 4)])
def test_H_slice_singular_coefficient(k, d):
    exp = gf.singular_extract("H_Td", k, d, order=8, precision=40)
    want = fl.h3_tilde(k - d, d)
    with mpmath.workdps(40):
        assert abs(exp.singular - mpmath.mpf(want.numerator) / want.denominator) < mpmath.mpf(10) ** -25


def test_Y_slice_expansion_leading_terms():
    d = 3
    exp = gf.singular_extract("Y_Td", 10, d, order=8, precision=40)
    lead = Q(2 * d + 3)
    eta4 = -Q((d - 1) * (d + 1) * (d + 2) * (d + 4) * (9 * d**2 + 27 * d + 10), 30 * (2 * d + 3))
    with mpmath.workdps(40):
        assert abs(exp.coeffs[0] - lead) < 1e-30
        assert abs(exp.coeffs[4] - mpmath.mpf(eta4.numerator) / eta4.denominator) < 1e-25


def test_low_precision_rejected():
    with pytest.raises(ValueError):
        gf.singular_extract("F", 3, precision=20)


def test_unknown_quantity_rejected():
    with pytest.raises(ValueError):
        gf.singular_extract("Z", 3)
