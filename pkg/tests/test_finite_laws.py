import random
from fractions import Fraction as Q

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hullstats import finite_laws as fl
from hullstats.families import Family

FAMILIES = list(Family)


def p_in_limit(u):
    return (7 - 3 * u) * u**6 / 4


def test_f3_values():
    assert fl.f3(1) == Q(8, 3)
    k = sympy.symbols("k")
    expr = sympy.Rational(4) * (k**2 + 2 * k - 1) * (5 * k**4 + 20 * k**3 + 27 * k**2 + 14 * k + 4)
    poly = sympy.Poly(expr, k)
    assert poly.degree() == 6 and poly.LC() == 20
    for kk in range(1, 30):
        assert fl.f3(kk) * 35 * kk * (kk + 1) * (kk + 2) == int(expr.subs(k, kk))


def test_f3_positive_and_domain():
    assert all(fl.f3(k) > 0 for k in range(1, 1001))
    with pytest.raises(ValueError):
        fl.f3(0)


@given(st.integers(3, 120), st.data())
@settings(max_examples=60)
def test_regime_identity_exact(k, data):
    d = data.draw(st.integers(2, k - 1))
    r = fl.regime_probabilities(k, d)
    assert r.p_finite + r.p_infinite == 1
    assert 0 <= r.p_infinite <= 1 and not r.complement_defined


def _expanded_finite(k, d):
    k, d = Q(k), Q(d)
    a = ((2 * d + 3) * (k - 1) * (k + 1) * (k + 2) * (k + 4) * (15 * k**4 + 90 * k**3 + 237 * k**2 + 306 * k + 140)
         - (2 * k + 3) * (d - 1) * (d + 1) * (d + 2) * (d + 4) * (15 * d**4 + 90 * d**3 + 237 * d**2 + 306 * d + 140))
    b = ((2 * d + 1) * (k - 2) * k * (k + 1) * (k + 3) * (15 * k**4 + 30 * k**3 + 57 * k**2 + 42 * k - 4)
         - (2 * k + 1) * (d - 2) * d * (d + 1) * (d + 3) * (15 * d**4 + 30 * d**3 + 57 * d**2 + 42 * d - 4))
    return (a / (105 * (2 * d + 3) * (k + 1) ** 2 * (k + 2) ** 2)
            - b / (105 * (2 * d + 1) * k**2 * (k + 1) ** 2)) / fl.f3(int(k))


def _expanded_infinite(k, d):
    k, d = Q(k), Q(d)
    a = ((2 * k + 3) * (d - 1) * (d + 1) * (d + 2) * (d + 4) * (15 * d**4 + 90 * d**3 + 237 * d**2 + 306 * d + 140)
         / (105 * (2 * d + 3) * (k + 1) ** 2 * (k + 2) ** 2))
    b = ((2 * k + 1) * (d - 2) * d * (d + 1) * (d + 3) * (15 * d**4 + 30 * d**3 + 57 * d**2 + 42 * d - 4)
         / (105 * (2 * d + 1) * k**2 * (k + 1) ** 2))
    return (a - b) / fl.f3(int(k))


@pytest.mark.parametrize("k,d", [(3, 2), (10, 4), (37, 20), (200, 199)])
def test_expanded_forms_agree_with_differences(k, d):
    r = fl.regime_probabilities(k, d)
    assert r.p_finite == _expanded_finite(k, d)
    assert r.p_infinite == _expanded_infinite(k, d)


def test_regime_limit_family_i():
    r = fl.regime_probabilities(2000, 1000)
    assert abs(float(r.p_infinite) - p_in_limit(0.5)) < 0.01


@pytest.mark.parametrize("fam", [Family.TRIANGULATION, Family.EULERIAN_TRIANGULATION])
def test_regime_limit_other_families(fam):
    r = fl.regime_probabilities(2000, 1500, fam)
    assert r.complement_defined
    assert r.p_finite + r.p_infinite == 1
    assert abs(float(r.p_infinite) - p_in_limit(0.75)) < 0.01


def test_monotone_approach_to_limit():
    for u in (0.3, 0.5, 0.7, 0.9):
        errs = [abs(float(fl.regime_probabilities(k, round(k * u)).p_infinite) - p_in_limit(round(k * u) / k))
                for k in (50, 200, 1000, 2000)]
        assert errs == sorted(errs, reverse=True)


@pytest.mark.parametrize("k,d", [(2, 1), (10, 1), (10, 10)])
def test_domain_errors(k, d):
    with pytest.raises(ValueError):
        fl.regime_probabilities(k, d)
    with pytest.raises(ValueError):
        fl.perimeter_expectation(k, d, "out")


def test_dh3_derivative_identity():
    k, Y = sympy.symbols("k Y")
    s2 = (k + Y) ** 2
    poly = (105 * s2**4 + 420 * (k**2 - 3) * s2**3 - 210 * (k**4 + 6 * k**2 + 49) * s2**2
            - 4 * (75 * k**6 - 567 * k**4 - 1715 * k**2 - 2273) * s2
            - (k - 5) * (k - 1) * (k + 1) * (k + 5) * (15 * k**4 + 138 * k**2 - 217))
    h3 = k * poly / (840 * Y * ((2 * k + Y) ** 2 - 1) ** 2)
    rhs = (25 - Y**2) * (1 - Y**2) / (24 * Y) * sympy.diff(h3, Y)
    rng = random.Random(7)
    for _ in range(20):
        kv = sympy.Rational(rng.randint(1, 60), rng.randint(1, 5))
        Yv = sympy.Rational(rng.randint(1, 90), rng.randint(1, 7))
        # the symbolic h3 and the module agree
        assert sympy.Rational(str(fl.h3(Q(str(kv)), Q(str(Yv))))) == h3.subs({k: kv, Y: Yv})
        want = rhs.subs({k: kv, Y: Yv})
        assert sympy.Rational(str(fl.dh3(Q(str(kv)), Q(str(Yv))))) == sympy.simplify(want)


def test_perimeter_expectations_at_large_k():
    k, d, u, c = 2000, 1000, 0.5, 1 / 3
    out = float(fl.perimeter_expectation(k, d, "out")) / d**2
    inn = float(fl.perimeter_expectation(k, d, "in")) / d**2
    want_out = 3 * c * (4 + 4 * u - 21 * u**6 + 17 * u**7 - 4 * u**8) / (2 * (4 - 7 * u**6 + 3 * u**7))
    want_in = 3 * c * (9 - 4 * u) * (1 - u) / (2 * (7 - 3 * u))
    assert abs(out / want_out - 1) < 0.02
    assert abs(inn / want_in - 1) < 0.02
    r = fl.regime_probabilities(k, d)
    mix = float(r.p_finite) * out + float(r.p_infinite) * inn
    assert abs(mix / (1.5 * c * (1 + u - 3 * u**6 + u**7)) - 1) < 0.02


def test_perimeter_expectation_bad_regime():
    with pytest.raises(ValueError):
        fl.perimeter_expectation(10, 4, "both")


def test_A_p_values():
    assert fl.A_p(1, 5) == Q(6, 5)
    assert fl.A_p(1, 3) == Q(2, 3)
    with pytest.raises(ValueError):
        fl.A_p(0, 5)


def test_A_p_generating_identity():
    beta, C = Q(1, 3), 5
    closed = np.sqrt((C**2 - 1 / 3) / (1 - 1 / 3))
    partial = float(C)
    sums = []
    for p in range(1, 201):
        partial += 2 * float(fl.A_p(p, C) * beta**p)
        sums.append(partial)
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    assert abs(closed - sums[-1]) < 1e-10


def test_A_p_float_recurrence_matches_exact():
    for C in (3, 5):
        arr = fl.A_p_array(40, C)
        exact = [float(fl.A_p(p, C)) for p in range(1, 41)]
        assert np.allclose(arr, exact, rtol=1e-12)


@pytest.mark.parametrize("fam", FAMILIES)
def test_pmf_total_mass_is_one(fam):
    for d in range(2, 51):
        assert fl.pmf_total_mass(d, fam) == 1


def test_pmf_small_d_examples():
    pmf = fl.perimeter_pmf(2, Family.QUADRANGULATION, 6)
    assert pmf.masses[2] == Q(3, 5)
    for p in range(1, 7):
        assert pmf.masses[2 * p] == fl.A_p(p, 5) / 2**p
    iii = fl.perimeter_pmf(2, Family.EULERIAN_TRIANGULATION, 3)
    assert iii.masses[2] == 2 * fl.A_p(1, 3) * Q(7, 15)
    ii = fl.perimeter_pmf(3, Family.TRIANGULATION, 4)
    assert sorted(ii.masses) == [1, 2, 3, 4]


@pytest.mark.parametrize("fam", FAMILIES)
def test_pmf_masses_nonnegative_and_partial_mass_increasing(fam):
    pmf = fl.perimeter_pmf(6, fam, 60)
    assert all(m >= 0 for m in pmf.masses.values())
    assert 0 < pmf.partial_mass() < 1


def test_pmf_domain():
    with pytest.raises(ValueError):
        fl.perimeter_pmf(1, "i", 3)


@pytest.mark.parametrize("fam", [Family.QUADRANGULATION, Family.TRIANGULATION])
def test_rescaled_pmf_matches_small_u_density(fam):
    grid = np.linspace(0.1, 3.0, 291)
    dens = np.array([v for _, v in fl.density_from_pmf(200, fam, grid)])
    assert np.max(np.abs(dens - fl.limit_density_small_u(grid, fam))) < 0.02


def test_small_u_density_family_iii_converges_like_one_over_d():
    grid = np.linspace(0.1, 3.0, 291)
    fam = Family.EULERIAN_TRIANGULATION
    errs = []
    for d in (100, 200, 400):
        dens = np.array([v for _, v in fl.density_from_pmf(d, fam, grid)])
        errs.append(np.max(np.abs(dens - fl.limit_density_small_u(grid, fam))))
    assert errs[0] > errs[1] > errs[2]
    assert 1.8 < errs[0] / errs[1] < 2.2 and 1.8 < errs[1] / errs[2] < 2.2


def test_small_u_densities_match_closed_forms():
    L = np.linspace(0.1, 3, 7)
    assert np.allclose(fl.limit_density_small_u(L, "i"), 6 * np.sqrt(3) * np.sqrt(L / np.pi) * np.exp(-3 * L))
    assert np.allclose(fl.limit_density_small_u(L, "ii"), 4 * np.sqrt(2) * np.sqrt(L / np.pi) * np.exp(-2 * L))
    assert np.allclose(fl.limit_density_small_u(L, "iii"), 16 * np.sqrt(L / np.pi) * np.exp(-4 * L))


def test_regime_table():
    rows = fl.regime_table(12)
    assert [r.d for r in rows] == list(range(2, 12))
