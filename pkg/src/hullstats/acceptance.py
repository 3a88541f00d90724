"""Acceptance checks 1-13, shared by the test suite and ``hullstats selftest``.

Each check returns a :class:`CheckResult`; ``detail`` carries the worst
observed deviation so a failure says by how much it missed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import finite_laws, limit_laws
from .families import Family

FAMILIES = tuple(Family)
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, name):
    def deco(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            return CheckResult(number, name, bool(passed), detail, time.perf_counter() - t0)
        run.number = number
        run.check_name = name
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


@_timed(1, "exact regime identity")
def check_regime_identity(k_max: int = 200):
    """p_finite + p_infinite = 1 exactly, family (i), 3 <= k <= k_max."""
    bad = []
    for k in range(3, k_max + 1):
        for d in range(2, k):
            r = finite_laws.regime_probabilities(k, d)
            if r.p_finite + r.p_infinite != 1 or not 0 <= r.p_finite <= 1:
                bad.append((k, d))
    return not bad, f"{len(bad)} violations over k <= {k_max}" + (f", first {bad[0]}" if bad else "")


@_timed(2, "finite-k regime limit")
def check_regime_limit(k: int = 2000, n_u: int = 20, tol: float = 0.01):
    worst = 0.0
    for fam in FAMILIES:
        for j in range(1, n_u + 1):
            u = j / (n_u + 1)
            d = int(math.floor(k * u + 0.5))
            p = float(finite_laws.regime_probabilities(k, d, fam).p_infinite)
            worst = max(worst, abs(p - limit_laws.regime_probability(u, "in")))
    return worst < tol, f"max |p_infinite - p_in(u)| = {worst:.2e} (tol {tol})"


U_NINE = tuple(j / 10 for j in range(1, 10))


@_timed(3, "density normalizations")
def check_normalizations(tol: float = 1e-8):
    worst = 0.0
    for fam in FAMILIES:
        c = fam.c
        for u in U_NINE:
            sc = limit_laws.density_scales(u, c)
            for regime in ("out", "in"):
                total = limit_laws.integrate_L(lambda L: limit_laws.perimeter_density(L, u, regime, fam), sc)
                worst = max(worst, abs(total - limit_laws.regime_probability(u, regime)))
    return worst < tol, f"max normalization error {worst:.2e} (tol {tol})"


@_timed(4, "Laplace pairs")
def check_laplace_pairs(tol: float = 1e-8):
    from scipy import integrate

    worst = 0.0
    for mu in (0.5, 1.0, 2.0, 5.0):
        def quad(fn):
            return integrate.quad(lambda X: math.exp(-mu * X) * fn(X), 0, np.inf,
                                  epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        worst = max(worst, abs(quad(limit_laws.M_check) - limit_laws.M(mu)))
        for B in (0.25, 1.0, 4.0):
            worst = max(worst, abs(quad(lambda X: limit_laws.Q_check(X, B)) - limit_laws.Q(mu, B)))
    return worst < tol, f"max transform error {worst:.2e} (tol {tol})"


@_timed(5, "perimeter moment identity")
def check_moment(tol: float = 1e-6):
    worst = 0.0
    for fam in FAMILIES:
        for u in U_NINE:
            sc = limit_laws.density_scales(u, fam.c)
            m = limit_laws.integrate_L(lambda L: L * limit_laws.perimeter_density(L, u, "total", fam), sc)
            worst = max(worst, abs(m / limit_laws.perimeter_expectation_limit(u, "none", fam) - 1))
    return worst < tol, f"max relative error {worst:.2e} (tol {tol})"


@_timed(6, "joint-law volume mean")
def check_volume_mean(tol: float = 1e-4, tol_end: float = 1e-6):
    worst = 0.0
    for fam in FAMILIES:
        for u in (0.2, 0.5, 0.8):
            worst = max(worst, abs(limit_laws.mean_volume_numeric(u, fam) / limit_laws.mean_volume_out(u, fam) - 1))
    end = 0.0
    for fam in FAMILIES:
        end = max(end, abs(limit_laws.mean_volume_out(0.0, fam) - fam.f / 96),
                  abs(limit_laws.mean_volume_out(1.0, fam) - 7 * fam.f / 480),
                  abs(limit_laws.mean_volume_numeric(0.0, fam) - fam.f / 96))
    ok = worst < tol and end < tol_end
    return ok, f"derivative rel. error {worst:.2e} (tol {tol}); endpoints {end:.2e} (tol {tol_end})"


@_timed(7, "conditional volume law is u-independent")
def check_volume_given_L(tol: float = 1e-8, tol_mean: float = 1e-6):
    worst = 0.0
    for fam in FAMILIES:
        for u in (0.2, 0.5, 0.8):
            for sigma in (0.5, 2.0):
                for L in (0.5, 2.0):
                    a = limit_laws.volume_laplace_given_L_ratio(sigma, L, u, fam)
                    b = limit_laws.volume_laplace_given_L(sigma, L, fam)
                    worst = max(worst, abs(a - b))
    mean_err = 0.0
    for fam in FAMILIES:
        for L in (0.5, 1.0, 2.0):
            num = limit_laws.conditional_volume_mean_numeric(L, fam)
            mean_err = max(mean_err, abs(num - limit_laws.mean_volume_given_L(L, fam)))
    ok = worst < tol and mean_err < tol_mean
    return ok, f"max ratio-vs-closed deviation {worst:.2e} (tol {tol}); E[V|L] error {mean_err:.2e} (tol {tol_mean})"


@_timed(8, "singularity pipeline")
def check_singular(precision: int = 40, tol: float = 1e-25):
    import mpmath

    from .exactnum import bigfloat
    from .gf_engine import singular_extract

    worst = mpmath.mpf(0)
    with mpmath.workdps(precision):
        for k in range(3, 11):
            s = singular_extract("F", k, precision=precision).singular
            worst = max(worst, abs(s - bigfloat(finite_laws.f3(k), precision)))
        for k, d in ((3, 2), (5, 3), (7, 4)):
            s = singular_extract("G", k, d, precision=precision).singular
            want = finite_laws.h3(k - d, 2 * d + 3) - finite_laws.h3(k - d, 2 * d + 1)
            worst = max(worst, abs(s - bigfloat(want, precision)))
        for k, d in ((3, 2), (6, 3), (9, 5)):
            s = singular_extract("H_Td", k, d, precision=precision).singular
            worst = max(worst, abs(s - bigfloat(finite_laws.h3_tilde(k - d, d), precision)))
    worst = float(worst)
    return worst < tol, f"max coefficient error {worst:.1e} (tol {tol:.0e}, {precision} digits)"


@_timed(9, "operator identity residual")
def check_propK(order: int = 12):
    from .gf_engine import check_propK as residual

    nonzero = []
    for lam in (Fraction(1, 10), Fraction(1, 7)):
        r = residual(order, lam)
        if not r.is_zero():
            nonzero.append(str(lam))
    return not nonzero, ("residual identically zero" if not nonzero else f"nonzero residual at lambda={nonzero}") + f" to order {order}"


@_timed(10, "enumeration oracle")
def check_enumeration(max_N: int = 6, rooted_N: int = 8):
    from .enum_oracle import census, rooted_quadrangulation_count
    from .gf_engine import F_series

    bad = []
    for N in range(1, max_N + 1):
        counts = census(N).counts_by_k
        for k in range(1, N + 2):
            want = F_series(k, max_N + 1)[N]
            if counts.get(k, 0) != want:
                bad.append((N, k, counts.get(k, 0), want))
    F1 = F_series(1, rooted_N + 1)
    for N in range(1, rooted_N + 1):
        if F1[N] != rooted_quadrangulation_count(N):
            bad.append((N, 1, F1[N], rooted_quadrangulation_count(N)))
    return not bad, ("census equals series for all N <= 6 and rooted counts to N = 8" if not bad
                     else f"{len(bad)} mismatches, first {bad[0]}")


@_timed(11, "discrete perimeter laws")
def check_pmfs(d_max: int = 50, d_density: int = 200, tol: float = 0.02):
    bad = [(fam.roman, d) for fam in FAMILIES for d in range(2, d_max + 1)
           if finite_laws.pmf_total_mass(d, fam) != 1]
    grid = np.linspace(0.1, 3.0, 291)
    sup = {}
    for fam in FAMILIES:
        dens = np.array([v for _, v in finite_laws.density_from_pmf(d_density, fam, grid)])
        sup[fam.roman] = float(np.max(np.abs(dens - finite_laws.limit_density_small_u(grid, fam))))
    ok = not bad and all(v < tol for v in sup.values())
    sups = ", ".join(f"{k}: {v:.4f}" for k, v in sup.items())
    return ok, f"{len(bad)} total-mass failures; sup-norm at d={d_density} {sups} (tol {tol})"


def mc_plans(samples: int = 2000, seed: int = 20240601, workers: int = 1):
    from .mc.experiment import ExperimentPlan

    main = ExperimentPlan(N=400_000, samples=samples, seed=seed, k_bins=((20, 40),), d_ratio=0.5,
                          observables=("out_fraction", "ref_out_fraction", "L_out", "ref_L_out", "c_fit"),
                          workers=workers)
    small_u = ExperimentPlan(N=1_000_000, samples=samples, seed=seed + 1, k_bins=((25, 35),),
                             d_ratio=None, d_values=(5,), observables=("out_fraction", "V_out"),
                             workers=workers)
    return main, small_u


@_timed(12, "Monte Carlo")
def check_monte_carlo(samples: int = 2000, seed: int = 20240601, workers: int = 1):
    from .mc.experiment import run_experiment

    main, small_u = mc_plans(samples, seed, workers)
    r1 = run_experiment(main)
    r2 = run_experiment(small_u)
    of, ref = r1.get("out_fraction"), r1.get("ref_out_fraction")
    Lo, refL, cfit = r1.get("L_out"), r1.get("ref_L_out"), r1.get("c_fit")
    Vo = r2.get("V_out")
    if of.missing or Lo.missing or Vo.missing:
        return False, "empty bin"
    ok1 = abs(of.mean - ref.mean) <= 3 * of.stderr + 0.03
    ok2 = abs(Lo.mean / refL.mean - 1) <= 0.10
    target = Family.QUADRANGULATION.f / 96
    ok3 = abs(Vo.mean / target - 1) <= 0.15
    c = Family.QUADRANGULATION.c
    detail = (f"out-fraction {of.mean:.4f}+-{of.stderr:.4f} vs exact {ref.mean:.4f} (n={of.n}) [{'ok' if ok1 else 'miss'}]; "
              f"L_out {Lo.mean:.4f}+-{Lo.stderr:.4f} vs {refL.mean:.4f} [{'ok' if ok2 else 'miss'}], "
              f"fitted c {cfit.mean:.4f} vs default {c:.4f} (fitted-c prediction {refL.mean * cfit.mean / c:.4f}); "
              f"V_out(d=5) {Vo.mean:.4f}+-{Vo.stderr:.4f} vs f/96={target:.4f} (n={Vo.n}) [{'ok' if ok3 else 'miss'}]")
    return ok1 and ok2 and ok3, detail


@_timed(13, "figure data")
def check_figures(tol: float = 1e-12):
    from . import figures

    problems = []
    fam = Family.QUADRANGULATION
    t2 = figures.build(2, fam)
    if np.max(np.abs(t2.column("p_out") + t2.column("p_in") - 1)) > tol:
        problems.append("fig2 sum")
    i = t2.column("u").tolist().index(0.5)
    if abs(t2.rows[i][1] - 501 / 512) > tol:
        problems.append("fig2 p_out(1/2)")
    for which, regime in ((3, "out"), (4, "in")):
        t = figures.build(which, fam)
        u = 0.375
        col = t.column(f"{regime}[u={u:g}]")
        L = t.column("L")
        want = limit_laws.perimeter_density(L, u, regime, fam) / limit_laws.regime_probability(u, regime)
        if np.max(np.abs(col - want)) > tol:
            problems.append(f"fig{which} column")
        lim = t.column(f"{regime}[u->0]")
        # the limit density carries unit mass; the grid stops at L = 3
        mass = _trapezoid(lim, L)
        if not 0.98 < mass <= 1.0 + 1e-6:
            problems.append(f"fig{which} u->0 mass {mass:.4f}")
    t5 = figures.build(5, fam)
    if t5.column("in_X[u->1]")[0] != 0.0:
        problems.append("fig5 X=0")
    t6 = figures.build(6, fam)
    for u in figures.U_FOUR:
        s = t6.column(f"D_out[u={u:g}]") + t6.column(f"D_in[u={u:g}]") - t6.column(f"D[u={u:g}]")
        if np.max(np.abs(s)) > tol:
            problems.append("fig6 sum")
    t7 = figures.build(7, fam)
    for u in figures.U_FOUR:
        if np.max(np.abs(t7.column(f"pi_out[u={u:g}]") + t7.column(f"pi_in[u={u:g}]") - 1)) > tol:
            problems.append("fig7 sum")
    t8 = figures.build(8, fam)
    uu = t8.column("u")
    p0 = t8.column("pi_out[L=0]")
    inner = (uu > 0) & (uu < 1)
    closed = (1 - uu) ** 6 / ((1 - 2 * uu + 2 * uu**2) * (1 - 4 * uu + 5 * uu**2 - 2 * uu**3 + uu**4))
    if np.max(np.abs(p0[inner] - closed[inner])) > tol:
        problems.append("fig8 L=0")
    t14 = figures.build(14, fam)
    w = t14.column("W_mean")
    # rises to a single interior maximum, then falls to 0 at u = 1
    signs = np.sign(np.diff(w))
    unimodal = np.count_nonzero(np.diff(signs) != 0) == 1
    if abs(w[0] - 0.15) > tol or abs(w[-1]) > tol or not unimodal:
        problems.append("fig14 shape")
    return not problems, "all spot checks agree" if not problems else "; ".join(problems)


CHECKS = (check_regime_identity, check_regime_limit, check_normalizations, check_laplace_pairs,
          check_moment, check_volume_mean, check_volume_given_L, check_singular, check_propK,
          check_enumeration, check_pmfs, check_monte_carlo, check_figures)


def run_all(skip=(), mc_samples: int = 2000, workers: int = 1, report=print) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        if check.number in skip:
            continue
        kwargs = {"samples": mc_samples, "workers": workers} if check.number == 12 else {}
        res = check(**kwargs)
        if report:
            report(res.line())
        results.append(res)
    return results
