"""Exact laws at finite k and d.

All quantities are rational functions of k, d (and of ``Y`` for the
critical-point coefficients) and are evaluated with :class:`Fraction`.

``f3(k)``            coefficient of (1-12g)^(3/2) in F(k, g)
``h3(k, Y)``         same coefficient in H(k, x, T), with Y = Y(T)
``h3_tilde(k, d)``   coefficient of (1-12h)^(3/2) in H(k, 1, T_d(y))
``dh3``, ``dh3_tilde``  the same for 2T dH/dT (perimeter first moment)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .families import Family

Q = Fraction


def _check_kd(k: int, d: int) -> None:
    if k < 3 or not 2 <= d <= k - 1:
        raise ValueError(f"need k >= 3 and 2 <= d <= k-1, got k={k}, d={d}")


def f3(k: int) -> Fraction:
    """Singular coefficient of F(k, g) at g = 1/12."""
    if k < 1:
        raise ValueError("f3 needs k >= 1")
    k = Q(k)
    return (4 * (k**2 + 2 * k - 1) * (5 * k**4 + 20 * k**3 + 27 * k**2 + 14 * k + 4)
            / (35 * k * (k + 1) * (k + 2)))


def h3(k, Y) -> Fraction:
    """Singular coefficient of H(k, x, T) at x -> 1, as a function of Y = Y(T)."""
    k, Y = Q(k), Q(Y)
    s2 = (k + Y) ** 2
    poly = (105 * s2**4 + 420 * (k**2 - 3) * s2**3 - 210 * (k**4 + 6 * k**2 + 49) * s2**2
            - 4 * (75 * k**6 - 567 * k**4 - 1715 * k**2 - 2273) * s2
            - (k - 5) * (k - 1) * (k + 1) * (k + 5) * (15 * k**4 + 138 * k**2 - 217))
    return k * poly / (840 * Y * ((2 * k + Y) ** 2 - 1) ** 2)


def _poly_d_out(d):
    return 15 * d**4 + 90 * d**3 + 237 * d**2 + 306 * d + 140


def h3_tilde(k, d) -> Fraction:
    """Singular coefficient of H(k, 1, T_d(y)) at y -> 1."""
    k, d = Q(k), Q(d)
    return ((d - 1) * (d + 1) * (d + 2) * (d + 4) * _poly_d_out(d) * (2 * d + 2 * k + 3)
            / (105 * (2 * d + 3) * (d + k + 1) ** 2 * (d + k + 2) ** 2))


def dh3(k, Y) -> Fraction:
    """Singular coefficient of 2T dH/dT at x -> 1, as a function of Y."""
    k, Y = Q(k), Q(Y)
    poly = (315 * Y**10 + 3780 * k * Y**9 + 19740 * k**2 * Y**8 - 1995 * Y**8
            + 60480 * k**3 * Y**7 - 20160 * k * Y**7 + 120960 * k**4 * Y**6
            - 82320 * k**2 * Y**6 + 16590 * Y**6 + 161280 * k**5 * Y**5
            - 174720 * k**3 * Y**5 + 71400 * k * Y**5 + 138240 * k**6 * Y**4
            - 209664 * k**4 * Y**4 + 101640 * k**2 * Y**4 + 3594 * Y**4
            + 69120 * k**7 * Y**3 - 139776 * k**5 * Y**3 + 60480 * k**3 * Y**3
            - 26784 * k * Y**3 + 15360 * k**8 * Y**2 - 39936 * k**6 * Y**2
            + 24192 * k**4 * Y**2 - 54224 * k**2 * Y**2 - 36217 * Y**2
            - 65100 * k * Y - 21700 * k**2 + 5425)
    return (k * (25 - Y**2) * (1 - Y**2) * poly
            / (20160 * Y**3 * (2 * k + Y - 1) ** 3 * (2 * k + Y + 1) ** 3))


def dh3_tilde(k, d) -> Fraction:
    """Singular coefficient of 2T dH/dT at x = 1, T = T_d(y), y -> 1."""
    k, d = Q(k), Q(d)
    poly = (6 * k * d**6 + 12 * k**2 * d**5 + 54 * k * d**5 + 24 * d**5 + 6 * k**3 * d**4
            + 90 * k**2 * d**4 + 240 * k * d**4 + 180 * d**4 + 36 * k**3 * d**3
            + 270 * k**2 * d**3 + 630 * k * d**3 + 534 * d**3 + 68 * k**3 * d**2
            + 405 * k**2 * d**2 + 937 * k * d**2 + 783 * d**2 + 42 * k**3 * d
            + 285 * k**2 * d + 705 * k * d + 567 * d - 2 * k**3 + 63 * k**2 + 203 * k + 162)
    return (2 * (d - 1) * (d + 1) * (d + 2) * (d + 4) * _poly_d_out(d) * poly
            / (315 * (2 * d + 3) ** 3 * (d + k + 1) ** 3 * (d + k + 2) ** 3))


@dataclass(frozen=True)
class RegimeProbabilities:
    """Probabilities that the hull stays finite (out) or becomes infinite (in).

    ``complement_defined`` marks families where only ``p_infinite`` has an
    independent formula and ``p_finite`` is ``1 - p_infinite``.
    """

    k: int
    d: int
    family: Family
    p_finite: Fraction
    p_infinite: Fraction
    complement_defined: bool = False


def _p_infinite_tri(k: int, d: int) -> Fraction:
    k, d = Q(k), Q(d)
    pref = k**2 * (k + 1) ** 2 / (2 * (2 * k + 1) * (5 * k**6 + 15 * k**5 + 14 * k**4 + 3 * k**3 - k**2 - 1))
    a = (d * (d + 1) * (d + 2) * (d + 3) * (10 * d**4 + 60 * d**3 + 146 * d**2 + 168 * d + 71)
         / ((2 * d + 3) * (k + 1) ** 3))
    b = ((d - 1) * d * (d + 1) * (d + 2) * (10 * d**4 + 20 * d**3 + 26 * d**2 + 16 * d - 1)
         / ((2 * d + 1) * k**3))
    return pref * (a - b)


def _p_infinite_euler(k: int, d: int) -> Fraction:
    k, d = Q(k), Q(d)
    pref = (k * (k + 1) * (k + 2) * (k + 3)
            / (2 * (2 * k + 3) * (10 * k**6 + 90 * k**5 + 283 * k**4 + 348 * k**3 + 103 * k**2 - 42 * k - 36)))
    a = ((d - 1) * (d + 1) * (d + 3) * (d + 5) * (10 * d**4 + 80 * d**3 + 256 * d**2 + 384 * d + 189) * (k + 2)
         / ((d + 2) * (k + 1) ** 2 * (k + 3) ** 2))
    b = ((d - 2) * d * (d + 2) * (d + 4) * (10 * d**4 + 40 * d**3 + 76 * d**2 + 72 * d - 9) * (k + 1)
         / ((d + 1) * k**2 * (k + 2) ** 2))
    return pref * (a - b)


def regime_probabilities(k: int, d: int, family: Family | str = Family.QUADRANGULATION) -> RegimeProbabilities:
    """Exact out/in probabilities at finite (k, d) in the N -> infinity local limit."""
    _check_kd(k, d)
    family = Family.parse(family)
    if family is Family.QUADRANGULATION:
        K = k - d
        norm = f3(k)
        p_fin = (h3(K, 2 * d + 3) - h3(K, 2 * d + 1)) / norm
        p_inf = (h3_tilde(K, d) - h3_tilde(K, d - 1)) / norm
        return RegimeProbabilities(k, d, family, p_fin, p_inf)
    p_inf = _p_infinite_tri(k, d) if family is Family.TRIANGULATION else _p_infinite_euler(k, d)
    return RegimeProbabilities(k, d, family, 1 - p_inf, p_inf, complement_defined=True)


def perimeter_expectation(k: int, d: int, regime: str) -> Fraction:
    """Exact E[hull perimeter | out] or E[hull perimeter | in] for quadrangulations."""
    _check_kd(k, d)
    K = k - d
    if regime == "out":
        num = dh3(K, 2 * d + 3) - dh3(K, 2 * d + 1)
        den = h3(K, 2 * d + 3) - h3(K, 2 * d + 1)
    elif regime == "in":
        num = dh3_tilde(K, d) - dh3_tilde(K, d - 1)
        den = h3_tilde(K, d) - h3_tilde(K, d - 1)
    else:
        raise ValueError("regime must be 'out' or 'in'")
    return num / den


# -- discrete perimeter laws at infinite k ----------------------------------------

def A_p(p: int, C: int) -> Fraction:
    """``A_p(C) = C^(1-2p) sum_q binom(p-1, q) binom(2q+1, q) ((C^2-1)/4)^(q+1)``."""
    if p < 1:
        raise ValueError("A_p needs p >= 1")
    if C <= 0:
        raise ValueError("A_p needs C > 0")
    w = Q(C * C - 1, 4)
    total = sum(math.comb(p - 1, q) * math.comb(2 * q + 1, q) * w ** (q + 1) for q in range(p))
    return total / Q(C) ** (2 * p - 1)


def A_p_array(p_max: int, C: float) -> np.ndarray:
    """Float values ``A_1 .. A_p_max`` from the three-term recurrence.

    With ``sqrt((C^2 - b)/(1 - b)) = sum a_n b^n`` (so ``a_0 = C`` and
    ``a_n = 2 A_n``) the coefficients satisfy
    ``C^2 (n+1) a_(n+1) = ((C^2+1) n + (C^2-1)/2) a_n - (n-1) a_(n-1)``.
    """
    C2 = float(C) ** 2
    a = np.empty(p_max + 1)
    a[0] = C
    if p_max >= 1:
        a[1] = (C2 - 1) / (2 * C)
    for n in range(1, p_max):
        a[n + 1] = (((C2 + 1) * n + (C2 - 1) / 2) * a[n] - (n - 1) * a[n - 1]) / (C2 * (n + 1))
    return a[1:] / 2


@dataclass(frozen=True)
class _PmfShape:
    C: int
    weight: int
    step: int  # perimeter = step * p

    def ratios(self, family: Family, d: int) -> tuple[Fraction, Fraction]:
        if family is Family.QUADRANGULATION:
            return Q((d - 1) * (d + 4), (d + 1) * (d + 2)), Q((d - 2) * (d + 3), d * (d + 1))
        if family is Family.TRIANGULATION:
            return Q(d * (d + 3), (d + 1) * (d + 2)), Q((d - 1) * (d + 2), d * (d + 1))
        return Q((d - 1) * (d + 5), (d + 1) * (d + 3)), Q((d - 2) * (d + 4), d * (d + 2))


_SHAPES = {
    Family.QUADRANGULATION: _PmfShape(5, 1, 2),
    Family.TRIANGULATION: _PmfShape(3, 1, 1),
    Family.EULERIAN_TRIANGULATION: _PmfShape(3, 2, 2),
}


@dataclass(frozen=True)
class PerimeterPMF:
    """Law of the hull perimeter at distance d when k -> infinity.

    ``masses`` maps the perimeter value (2p, p or 2p by family) to its
    probability for 1 <= p <= p_max.
    """

    family: Family
    d: int
    masses: dict

    def partial_mass(self) -> Fraction:
        return sum(self.masses.values(), Q(0))


def _pmf_check(d: int, family: Family) -> _PmfShape:
    if d < 2:
        raise ValueError(f"perimeter laws need d >= 2 (got {d})")
    return _SHAPES[family]


def perimeter_pmf(d: int, family: Family | str, p_max: int) -> PerimeterPMF:
    """Exact masses ``weight * A_p(C) * (r_d^p - r_(d-1)^p)`` for 1 <= p <= p_max."""
    family = Family.parse(family)
    shape = _pmf_check(d, family)
    r, s = shape.ratios(family, d)
    masses = {}
    for p in range(1, p_max + 1):
        masses[shape.step * p] = shape.weight * A_p(p, shape.C) * (r**p - s**p)
    return PerimeterPMF(family, d, masses)


def _exact_sqrt(q: Fraction) -> Fraction:
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise ArithmeticError(f"{q} is not a rational square")
    return Q(rn, rd)


def pmf_total_mass(d: int, family: Family | str) -> Fraction:
    """Total mass summed to p = infinity, via the closed generating identity.

    ``sum_p A_p(C) b^p = (sqrt((C^2-b)/(1-b)) - C)/2`` telescopes the two
    ratio powers; both square roots are rational for every d.
    """
    family = Family.parse(family)
    shape = _pmf_check(d, family)
    r, s = shape.ratios(family, d)
    C2 = shape.C**2

    def gen(b: Fraction) -> Fraction:
        return (_exact_sqrt((C2 - b) / (1 - b)) - shape.C) / 2

    return shape.weight * (gen(r) - gen(s))


def pmf_masses_float(d: int, family: Family | str, p_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(perimeters, masses) in floating point for large p_max."""
    family = Family.parse(family)
    shape = _pmf_check(d, family)
    r, s = (float(v) for v in shape.ratios(family, d))
    p = np.arange(1, p_max + 1, dtype=float)
    with np.errstate(under="ignore"):
        masses = shape.weight * A_p_array(p_max, shape.C) * (r**p - s**p)
    return shape.step * p, masses


def density_from_pmf(d: int, family: Family | str, L_grid: Iterable[float]) -> list[tuple[float, float]]:
    """Density of the rescaled perimeter ``L = perimeter/d^2`` read off the pmf.

    The mass at perimeter value ``step * p`` spreads over a bin of width
    ``step / d^2``; values between lattice points are linearly interpolated.
    """
    family = Family.parse(family)
    shape = _SHAPES[family]
    grid = np.asarray(list(L_grid), dtype=float)
    if grid.size == 0:
        return []
    d2 = float(d) ** 2
    p_max = int(np.ceil(grid.max() * d2 / shape.step)) + 2
    perims, masses = pmf_masses_float(d, family, p_max)
    dens = masses * d2 / shape.step
    vals = np.interp(grid, perims / d2, dens)
    return list(zip(grid.tolist(), vals.tolist()))


def limit_density_small_u(L, family: Family | str):
    """Large-d perimeter density at k = infinity: ``2 sqrt(L) e^(-L/c) / (c^(3/2) sqrt(pi))``."""
    c = Family.parse(family).c
    L = np.asarray(L, dtype=float)
    return 2 * np.sqrt(L) * np.exp(-L / c) / (c**1.5 * np.sqrt(np.pi))


def regime_table(k: int, family: Family | str = Family.QUADRANGULATION,
                 d_values: Sequence[int] | None = None) -> list[RegimeProbabilities]:
    d_values = range(2, k) if d_values is None else d_values
    return [regime_probabilities(k, d, family) for d in d_values]
