import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullstats import limit_laws as ll
from hullstats.families import Family

FAMILIES = list(Family)
unit = st.floats(0.02, 0.98)


def test_regime_probability_values():
    assert ll.regime_probability(0.5, "out") == 0.978515625
    assert ll.regime_probability(0.0, "out") == 1.0
    assert ll.regime_probability(1.0, "in") == 1.0


@given(st.floats(0, 1))
def test_regime_probabilities_sum_to_one(u):
    assert math.isclose(ll.regime_probability(u, "out") + ll.regime_probability(u, "in"), 1.0, abs_tol=1e-15)


@pytest.mark.parametrize("u", [-0.1, 1.1, float("nan")])
def test_u_domain(u):
    with pytest.raises(ValueError):
        ll.regime_probability(u, "out")


def test_density_domain_is_open_interval():
    with pytest.raises(ValueError):
        ll.perimeter_density(1.0, 0.0, "out")
    with pytest.raises(ValueError):
        ll.perimeter_density(1.0, 0.5, "sideways")


def test_density_vectorizes():
    L = np.linspace(0, 3, 7)
    vec = ll.perimeter_density(L, 0.4, "total")
    assert vec.shape == (7,)
    assert vec[0] == 0.0
    assert np.allclose(vec, [float(ll.perimeter_density(x, 0.4, "total")) for x in L])


@pytest.mark.parametrize("fam", FAMILIES)
@pytest.mark.parametrize("u", [0.15, 0.5, 0.85])
def test_conditional_means_integrate(fam, u):
    sc = ll.density_scales(u, fam.c)
    for regime in ("out", "in"):
        mass = ll.integrate_L(lambda L: ll.perimeter_density(L, u, regime, fam), sc)
        mean = ll.integrate_L(lambda L: L * ll.perimeter_density(L, u, regime, fam), sc)
        assert math.isclose(mean / mass, ll.perimeter_expectation_limit(u, regime, fam), rel_tol=1e-7)


def test_out_density_approaches_small_u_limit():
    u = 1e-4
    L = np.linspace(0.05, 2.5, 12)
    cond = ll.perimeter_density(L, u, "out") / ll.regime_probability(u, "out")
    assert np.allclose(cond, ll.perimeter_density_limit(L, "out_u0"), rtol=1e-3, atol=1e-4)


def test_out_density_approaches_u1_limit():
    u = 1 - 1e-4
    L = np.linspace(0.05, 2.5, 12)
    cond = ll.perimeter_density(L, u, "out") / ll.regime_probability(u, "out")
    assert np.allclose(cond, ll.perimeter_density_limit(L, "out_u1"), rtol=2e-3, atol=1e-4)


def test_in_density_approaches_small_u_limit():
    u = 1e-3
    L = np.linspace(0.05, 2.5, 12)
    cond = ll.perimeter_density(L, u, "in") / ll.regime_probability(u, "in")
    assert np.allclose(cond, ll.perimeter_density_limit(L, "in_u0"), rtol=1e-2, atol=1e-3)


@pytest.mark.parametrize("which", ["out_u0", "out_u1", "in_u0", "in_u1_X"])
def test_limit_densities_have_unit_mass(which):
    mass = ll.integrate_L(lambda x: ll.perimeter_density_limit(x, which), (1 / 3, 1.0))
    assert math.isclose(mass, 1.0, rel_tol=1e-8)


def test_unknown_limit():
    with pytest.raises(ValueError):
        ll.perimeter_density_limit(1.0, "out_u2")


@given(st.floats(0.0, 5.0), unit)
@settings(max_examples=40)
def test_posteriors_are_probabilities(L, u):
    a, b = ll.regime_posterior(L, u)
    assert 0.0 <= a <= 1.0 and math.isclose(a + b, 1.0)


def test_posterior_closed_form_at_zero_perimeter_is_the_limit():
    for u in (0.3, 0.6):
        closed = ll.regime_posterior(0.0, u)[0]
        near = ll.regime_posterior(1e-12, u)[0]  # corrections are O(sqrt L)
        assert math.isclose(closed, near, rel_tol=1e-4)


def test_posterior_u1_closed_form_is_the_limit():
    for L in (0.2, 1.0, 2.0):
        assert math.isclose(ll.regime_posterior(L, 1.0)[0], ll.regime_posterior(L, 1 - 1e-5)[0], rel_tol=2e-3)


def test_kernels_smooth_across_series_switch():
    for edge in (0.25, -0.25):
        below = ll.M(edge * (1 - 1e-9))
        above = ll.M(edge * (1 + 1e-9))
        assert math.isclose(below, above, rel_tol=1e-7)
        assert math.isclose(ll.Q(edge * (1 - 1e-9), 2.0), ll.Q(edge * (1 + 1e-9), 2.0), rel_tol=1e-7)


def test_brackets_continuous_at_precision_switch():
    for fn in (ll.M_check, lambda X: ll.Q_check(X, 1.0)):
        assert math.isclose(fn(20.0 - 1e-9), fn(20.0 + 1e-9), rel_tol=1e-6)


def test_kernel_dispatch():
    assert ll.laplace_kernels("M", 1.0) == ll.M(1.0)
    assert ll.laplace_kernels("Q_check", 1.0, 2.0) == ll.Q_check(1.0, 2.0)
    with pytest.raises(ValueError):
        ll.laplace_kernels("R", 1.0)


@pytest.mark.parametrize("u", [0.2, 0.5, 0.8])
def test_perimeter_transforms_match_quadrature(u):
    tau = 0.7
    sc = ll.density_scales(u, 1 / 3)
    for regime, fn in (("out", ll.perimeter_laplace_out), ("in", ll.perimeter_laplace_in)):
        num = ll.integrate_L(lambda L: math.exp(-tau * L) * ll.perimeter_density(L, u, regime), sc)
        assert math.isclose(num, fn(tau, u), rel_tol=1e-8)


@pytest.mark.parametrize("u", [0.0, 0.3, 0.7])
def test_joint_transform_normalized(u):
    assert math.isclose(ll.joint_laplace(0.0, 0.0, u), 1.0, rel_tol=1e-12)


def test_joint_transform_at_zero_sigma_is_perimeter_transform():
    u, tau = 0.4, 1.3
    want = ll.perimeter_laplace_out(tau, u) / ll.regime_probability(u, "out")
    assert math.isclose(ll.joint_laplace(0.0, tau, u), want, rel_tol=1e-10)


def test_joint_transform_decreases_in_sigma():
    vals = [ll.joint_laplace(s, 0.0, 0.5) for s in (0.0, 0.01, 0.1, 1.0, 10.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_u0_joint_transform_matches_volume_transform():
    for s in (0.05, 0.5, 3.0):
        assert math.isclose(ll.joint_laplace(s, 0.0, 0.0), ll.cl_limit_transform(s), rel_tol=1e-10)


def test_zcoth_analytic_across_zero():
    for w in (-1e-3, -1e-5, 1e-5, 1e-3):
        series = 1 + w / 3 - w**2 / 45 + 2 * w**3 / 945
        assert math.isclose(ll._zcoth(w), series, rel_tol=1e-10)


@pytest.mark.parametrize("fam", FAMILIES)
def test_volume_mean_endpoints(fam):
    assert math.isclose(ll.mean_volume_out(0.0, fam), fam.f / 96, rel_tol=1e-14)
    assert math.isclose(ll.mean_volume_out(1.0, fam), 7 * fam.f / 480, rel_tol=1e-14)
    assert math.isclose(ll.mean_volume_out(1 - 1e-7, fam), 7 * fam.f / 480, rel_tol=1e-5)


@pytest.mark.parametrize("u", [0.1, 0.6, 0.9])
def test_volume_mean_from_transform(u):
    assert math.isclose(ll.mean_volume_numeric(u), ll.mean_volume_out(u), rel_tol=1e-5)


@pytest.mark.parametrize("u", [0.3, 0.7])
def test_conditional_volume_law_is_u_independent(u):
    for sigma in (0.3, 1.5):
        for L in (0.4, 1.7):
            assert math.isclose(ll.volume_laplace_given_L_ratio(sigma, L, u),
                                ll.volume_laplace_given_L(sigma, L), rel_tol=1e-9)


def test_conditional_volume_mean():
    for L in (0.0, 0.5, 3.0):
        assert math.isclose(ll.conditional_volume_mean_numeric(L), ll.mean_volume_given_L(L), rel_tol=1e-6)


def test_complement_volume_mean_shape():
    assert math.isclose(ll.complement_volume_mean(0.0), 36 / 240)
    assert ll.complement_volume_mean(1.0) == 0.0
    grid = np.linspace(0, 1, 201)
    vals = np.array([ll.complement_volume_mean(u) for u in grid])
    peak = grid[np.argmax(vals)]
    assert 0.3 < peak < 0.55


def test_c_override_rescales_perimeter():
    # doubling c doubles every perimeter scale
    a = ll.perimeter_expectation_limit(0.4, "out", c=2 / 3)
    b = ll.perimeter_expectation_limit(0.4, "out")
    assert math.isclose(a, 2 * b)
    assert math.isclose(float(ll.perimeter_density(1.0, 0.4, "out", c=2 / 3)),
                        float(ll.perimeter_density(0.5, 0.4, "out")) / 2)


def test_small_u_correction_is_linear_in_u():
    L = np.array([1.0, 3.0])
    errs = []
    for u in (1e-3, 1e-4, 1e-5):
        cond = ll.perimeter_density(L, u, "out") / ll.regime_probability(u, "out")
        errs.append(np.abs(cond / ll.perimeter_density_limit(L, "out_u0") - 1))
    assert np.allclose(errs[0] / errs[1], 10, rtol=0.02)
    assert np.allclose(errs[1] / errs[2], 10, rtol=0.02)
