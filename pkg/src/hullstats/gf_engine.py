"""Generating functions of pointed-rooted quadrangulations and their hulls.

Conventions
-----------
* ``g`` weights faces outside the hull, ``h`` faces inside it and ``alpha``
  marks the hull perimeter.  Both weights are parametrized as
  ``g = x(1+x+x^2)/(1+4x+x^2)^2`` (and ``h`` likewise with ``y``).
* Around ``g = 0`` everything is exact (Fraction coefficients).
* Around the critical point ``g = 1/12`` we expand in ``e = sqrt(6)*eps``
  where ``eps = (1-12g)^(1/4)``.  The reversal ``x(e)`` has rational
  coefficients, so the only irrational numbers that appear come from
  square roots taken inside ``lambda``; those are carried as mpmath floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import mpmath

from .exactnum import (
    DEFAULT_PRECISION,
    MIN_SINGULAR_PRECISION,
    SeriesError,
    TruncatedSeries,
    bigfloat,
    ps_pow,
    ps_reverse,
    ps_sqrt,
)
from .families import Family

S = TruncatedSeries


class BranchError(SeriesError):
    """The lambda root is degenerate at the requested expansion point."""


# -- parametrizations ----------------------------------------------------------

def _poly(coeffs, z: S) -> S:
    acc = S([0], z.order)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def weight_of(z):
    """Face weight ``z(1+z+z^2)/(1+4z+z^2)^2`` for a scalar or a series."""
    return z * (1 + z + z * z) / (1 + 4 * z + z * z) ** 2


def t_infinity(z):
    """Generating function of slices of unbounded depth, ``z(1+4z+z^2)/(1+z+z^2)^2``."""
    return z * (1 + 4 * z + z * z) / (1 + z + z * z) ** 2


def t_infinity_over_z(z):
    return (1 + 4 * z + z * z) / (1 + z + z * z) ** 2


def q_int(m: int, z):
    """``(1 - z^m)/(1 - z)`` as a polynomial; valid for m >= 0."""
    if m < 0:
        raise ValueError("q_int needs m >= 0")
    if m == 0:
        return 0 * z if isinstance(z, S) else 0
    acc = 1
    power = 1
    for _ in range(m - 1):
        power = power * z
        acc = acc + power
    return acc


def slice_gf(d: int, z):
    """``T_d(z)``: slices of depth between 2 and d, one weight per face.

    ``T_1 = 0`` and, for the telescoping formulas, ``T_0`` is the analytic
    continuation ``-(1+4z+z^2)(1+z^2)/(1+z+z^2)^2``.
    """
    if d < 0:
        raise ValueError("slice depth must be >= 0")
    if d == 1:
        return 0 * z if isinstance(z, S) else Fraction(0)
    if d == 0:
        return -t_infinity_over_z(z) * (1 + z * z)
    return t_infinity(z) * q_int(d - 1, z) * q_int(d + 4, z) / (q_int(d + 1, z) * q_int(d + 2, z))


def slice_gf_at_one(d: int) -> Fraction:
    """Exact ``T_d(1) = (2/3)(d-1)(d+4)/((d+1)(d+2))``."""
    return Fraction(2, 3) * Fraction((d - 1) * (d + 4), (d + 1) * (d + 2))


def Y_of_T(T):
    """``Y(T) = sqrt((3T - 50)/(3T - 2))``; exact when the ratio is a rational square."""
    ratio = (3 * T - 50) / (3 * T - 2)
    if isinstance(ratio, S):
        return ps_sqrt(ratio)
    if isinstance(ratio, (int, Fraction)):
        ratio = Fraction(ratio)
        rn, rd = math.isqrt(ratio.numerator), math.isqrt(ratio.denominator)
        if rn * rn == ratio.numerator and rd * rd == ratio.denominator:
            return Fraction(rn, rd)
        return mpmath.sqrt(bigfloat(ratio))
    return mpmath.sqrt(ratio)


def H_at_x_one(k: int, T):
    """``H(k, 1, T) = (2/3)((2k+Y)^2 - 25)/((2k+Y)^2 - 1)`` with ``Y = Y(T)``."""
    z = 2 * k + Y_of_T(T)
    z2 = z * z
    return Fraction(2, 3) * (z2 - 25) / (z2 - 1)


@lru_cache(maxsize=None)
def x_of_g(order: int) -> S:
    """Exact series ``x(g)`` inverting the quadrangulation weight map."""
    z = S.variable(order + 1, Fraction(1))
    return ps_reverse(weight_of(z)).truncate(order)


@lru_cache(maxsize=None)
def one_minus_x_of_e(order: int) -> S:
    """Exact series ``t(e) = 1 - x`` with ``e = sqrt(6)*(1-12g)^(1/4)``.

    Uses the closed form ``1 - 12g = (1-x)^4/(1+4x+x^2)^2``, which with
    ``t = 1-x`` gives ``e = t/sqrt(1 - t + t^2/6)``, a series with rational
    coefficients that is reverted exactly.
    """
    t = S.variable(order + 1, Fraction(1))
    e_of_t = t / ps_sqrt(1 - t + Fraction(1, 6) * t * t)
    return ps_reverse(e_of_t).truncate(order)


def x_of_eps_coefficients(order: int, precision: int = DEFAULT_PRECISION) -> list:
    """Coefficients of ``x`` in powers of ``eps`` (mpf), for comparison with known closed values."""
    t = one_minus_x_of_e(order)
    out = []
    with mpmath.workdps(precision):
        s6 = mpmath.sqrt(6)
        for n in range(order):
            c = -t[n] if n else 1 - t[0]
            out.append(bigfloat(c, precision) * s6**n)
    return out


# -- family parametrizations ---------------------------------------------------

@dataclass(frozen=True)
class WeightParametrization:
    """Face-weight map ``w(z)`` of one family.

    ``series_power`` is the power of the weight expanded as a series in z:
    family (ii) has ``w = sqrt(z(1+z))/(1+10z+z^2)^(3/4)`` so its square is
    the natural power series.
    """

    family: Family
    forward: Callable
    series_forward: Callable[[S], S]
    series_power: int = 1

    def critical_weight(self):
        return self.forward(mpmath.mpf(1))

    def reverse(self, order: int) -> S:
        """Series ``z(w**series_power)`` to the given order (exact rationals)."""
        z = S.variable(order + 1, Fraction(1))
        return ps_reverse(self.series_forward(z)).truncate(order)


def _w_quad(y):
    return y * (1 + y + y * y) / (1 + 4 * y + y * y) ** 2


def _w_tri(y):
    return mpmath.sqrt(y * (1 + y)) / (1 + 10 * y + y * y) ** mpmath.mpf(0.75)


def _w_tri_squared_series(z: S) -> S:
    return z * (1 + z) * ps_pow(1 + 10 * z + z * z, Fraction(-3, 2))


def _w_euler(y):
    return y * (1 + y * y) / (1 + y) ** 4


PARAMETRIZATIONS: Mapping[Family, WeightParametrization] = {
    Family.QUADRANGULATION: WeightParametrization(Family.QUADRANGULATION, _w_quad, _w_quad),
    Family.TRIANGULATION: WeightParametrization(Family.TRIANGULATION, _w_tri, _w_tri_squared_series, 2),
    Family.EULERIAN_TRIANGULATION: WeightParametrization(Family.EULERIAN_TRIANGULATION, _w_euler, _w_euler),
}


def volume_scale_factor(family: Family, precision: int = 30) -> mpmath.mpf:
    """Numerically recover ``f`` from ``w(y)/w(1) = 1 - (1-y)^4/f + ...``."""
    par = PARAMETRIZATIONS[Family.parse(family)]
    with mpmath.workdps(precision):
        w1 = par.critical_weight()
        # the (1-y)^4 coefficient of 1 - w(y)/w(1); lower orders vanish
        coeff = mpmath.taylor(lambda s: 1 - par.forward(1 - s) / w1, 0, 4)[4]
        return 1 / coeff


# -- lambda and H ---------------------------------------------------------------

def _lambda_parts(x, T):
    tinf = t_infinity(x)
    diff = tinf - T
    A = tinf * (1 + x**5) - x * x * T * (1 + x)
    D = A * A - 4 * x**5 * diff * diff
    return diff, A, D


def lambda_series(x_series: S, T, tol=0) -> S:
    """Small root ``lambda(x, T)`` of ``x^4 (Tinf-T) l^2 - A l + x (Tinf-T) = 0``.

    The root is evaluated in the rationalized form
    ``2x(Tinf-T)/(A + sqrt(A^2 - 4x^5 (Tinf-T)^2))``, which stays regular at
    both expansion points: around ``x = 0`` numerator and denominator are
    divided by ``x`` first, around ``x = 1`` the square root argument has a
    double zero that is stripped with tolerance ``tol``.
    """
    x = x_series
    if x.order == 0:
        raise SeriesError("empty x series")
    if _innermost_constant(x) == 0:
        tinf_over_x = t_infinity_over_z(x)
        diff = x * tinf_over_x - T
        a_over_x = tinf_over_x * (1 + x**5) - x * T * (1 + x)
        d_over_x2 = a_over_x * a_over_x - 4 * x**3 * diff * diff
        denom = a_over_x + ps_sqrt(d_over_x2, tol)
        if _leading_is_zero(denom, tol):
            raise BranchError("degenerate lambda denominator at x = 0")
        return 2 * diff / denom
    diff, A, D = _lambda_parts(x, T)
    root = ps_sqrt(D, tol)
    denom = A + root
    if _leading_is_zero(denom, tol):
        raise BranchError("vanishing denominator Tinf(x) - T in lambda")
    return 2 * x * diff / denom


def _innermost_constant(s):
    while isinstance(s, S):
        if s.order == 0:
            return 0
        s = s.coeffs[0]
    return s


def _leading_is_zero(s: S, tol) -> bool:
    if s.order == 0:
        return True
    c = s.coeffs[0]
    if isinstance(c, S):
        return c.order == 0 or _leading_is_zero(c, tol)
    return abs(c) <= tol if tol else c == 0


def lambda_relation_residual(x: S, T, lam: S) -> S:
    """``Tinf (1-l/x)(1-l x^4) - T (1-l x)(1-l x^2)``, times x to stay polynomial."""
    tinf = t_infinity(x)
    return tinf * (x - lam) * (1 - lam * x**4) - x * T * (1 - lam * x) * (1 - lam * x * x)


def H_series(k: int, x_series: S, T, lam: S | None = None, tol=0) -> S:
    """``H(k, x, T) = Tinf(x)(1-l x^(k-1))(1-l x^(k+4))/((1-l x^(k+1))(1-l x^(k+2)))``."""
    if k < 1:
        raise ValueError("H needs k >= 1")
    x = x_series
    if lam is None:
        lam = lambda_series(x, T, tol)
    num = (1 - lam * x ** (k - 1)) * (1 - lam * x ** (k + 4))
    den = (1 - lam * x ** (k + 1)) * (1 - lam * x ** (k + 2))
    return t_infinity(x) * num / den


def propK_sides(order: int, lam) -> tuple[S, S]:
    """Both sides of the operator identity at a given lambda (scalar or series in x).

    Left side applies ``H(1, x, .)`` to the parametrized input
    ``Tinf (1-l/x)(1-l x^4)/((1-l x)(1-l x^2))``; right side is the claimed
    image ``Tinf (1-l)(1-l x^5)/((1-l x^2)(1-l x^3))``.
    """
    x = S.variable(order, Fraction(1))
    tinf_over_x = t_infinity_over_z(x)
    lam_s = lam if isinstance(lam, S) else S([Fraction(lam)], order)
    T_in = tinf_over_x * (x - lam_s) * (1 - lam_s * x**4) / ((1 - lam_s * x) * (1 - lam_s * x * x))
    lhs = H_series(1, x, T_in)
    rhs = t_infinity(x) * (1 - lam_s) * (1 - lam_s * x**5) / ((1 - lam_s * x * x) * (1 - lam_s * x**3))
    return lhs, rhs


def check_propK(order: int, lambda_value) -> S:
    """Residual (left minus right) of the operator identity; zero when it holds."""
    if order > 64:
        raise ValueError("order above the configured maximum of 64")
    lhs, rhs = propK_sides(order, lambda_value)
    return lhs - rhs


# -- F and G around g = 0 -------------------------------------------------------

def F_of_x(k: int, x):
    """``F(k) = T_k(x) - T_(k-1)(x)`` for a scalar or series x."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return slice_gf(k, x) - slice_gf(k - 1, x)


@lru_cache(maxsize=None)
def F_series(k: int, order: int) -> S:
    """Exact series of ``F(k, g)`` in g (pointed-rooted maps at distance k)."""
    return F_of_x(k, x_of_g(order))


@dataclass
class CoefficientTable:
    """``[g^n1 h^n2 alpha^l] G(k, d, g, h, alpha)`` for ``n1 <= max_n1``, ``n2 <= max_n2``."""

    k: int
    d: int
    max_n1: int
    max_n2: int
    entries: dict = field(default_factory=dict)

    def get(self, n1: int, n2: int, ell: int) -> Fraction:
        return self.entries.get((n1, n2, ell), Fraction(0))

    def at_alpha_one(self) -> dict:
        out: dict = {}
        for (n1, n2, _), v in self.entries.items():
            out[(n1, n2)] = out.get((n1, n2), 0) + v
        return out

    def by_total(self) -> dict:
        """Counts grouped by total size ``N = n1 + n2`` as {N: {(V, L): count}}.

        Only sizes ``N <= min(max_n1, max_n2)`` are complete and reported.
        """
        out: dict = {}
        top = min(self.max_n1, self.max_n2)
        for (n1, n2, ell), v in self.entries.items():
            if v and n1 + n2 <= top:
                out.setdefault(n1 + n2, {})[(n2, ell)] = v
        return out


def H_power_coefficients(K: int, n_T: int, order_g: int) -> list[S]:
    """Series ``c_j(g)`` with ``H(K, x(g), T) = sum_j c_j(g) T^j`` for ``j < n_T``.

    Computed as a nested series: outer variable T, coefficients series in g.
    """
    xg = x_of_g(order_g)
    x = S([xg], n_T)  # x as a T-constant
    T = S([S([Fraction(0)], order_g), S([Fraction(1)], order_g)], n_T)
    H = H_series(K, x, T)
    return [H.coeffs[j] for j in range(n_T)]


def G_coeffs(k: int, d: int, max_n1: int, max_n2: int) -> CoefficientTable:
    """Exact coefficient table of the hull generating function G(k, d, g, h, alpha).

    ``G = H(k-d, x, alpha^2 T_d(y)) - H(k-d, x, alpha^2 T_(d-1)(y))``; the
    perimeter exponent of alpha is 2j for the T^j term.
    """
    if k < 3 or not 2 <= d <= k - 1:
        raise ValueError("G_coeffs needs k >= 3 and 2 <= d <= k-1")
    if max_n1 < 0 or max_n2 < 0:
        raise ValueError("orders must be non-negative")
    if max_n1 > 40 or max_n2 > 40:
        raise ValueError(f"nested order overflow: max_n1={max_n1}, max_n2={max_n2} exceed 40")
    n_T = max_n2 + 1  # T_d(y(h)) = O(h) so T^j = O(h^j)
    cj = H_power_coefficients(k - d, n_T, max_n1 + 1)
    yh = x_of_g(max_n2 + 1)
    Td = slice_gf(d, yh)
    Td1 = slice_gf(d - 1, yh)
    table = CoefficientTable(k, d, max_n1, max_n2)
    pow_d = S([Fraction(1)], max_n2 + 1)
    pow_d1 = S([Fraction(1)], max_n2 + 1)
    for j in range(n_T):
        diff = pow_d - pow_d1
        for n2 in range(max_n2 + 1):
            b = diff[n2]
            if b == 0:
                continue
            for n1 in range(max_n1 + 1):
                a = cj[j][n1]
                if a:
                    table.entries[(n1, n2, 2 * j)] = table.entries.get((n1, n2, 2 * j), 0) + a * b
        pow_d = pow_d * Td
        pow_d1 = pow_d1 * Td1
    table.entries = {key: v for key, v in table.entries.items() if v}
    return table


# -- singular expansions around g = 1/12 ---------------------------------------

@dataclass
class SingularExpansion:
    """Coefficients of a quantity in powers of eps (or eta) at the critical point.

    ``coeffs[n]`` multiplies ``eps**n``.  ``quantity`` names what was expanded.
    """

    quantity: str
    variable: str
    coeffs: list
    precision: int

    def term(self, n: int):
        return self.coeffs[n]

    @property
    def regular(self):
        return self.coeffs[0]

    @property
    def linear(self):
        """Coefficient of eps^4, i.e. of (1-12g)."""
        return self.coeffs[4]

    @property
    def singular(self):
        """Coefficient of eps^6, i.e. of (1-12g)^(3/2)."""
        return self.coeffs[6]

    def spurious_terms(self) -> dict:
        return {n: self.coeffs[n] for n in (1, 2, 3, 5) if n < len(self.coeffs)}


def _to_mp(c, precision):
    if isinstance(c, (int, Fraction)):
        return bigfloat(Fraction(c), precision)
    return mpmath.mpf(c)


def _e_series_to_eps(s: S, precision: int) -> list:
    """Rescale coefficients from powers of ``e = sqrt6*eps`` to powers of eps."""
    with mpmath.workdps(precision):
        s6 = mpmath.sqrt(6)
        return [+(_to_mp(c, precision) * s6**n) for n, c in enumerate(s.coeffs)]


def _H_near_one(K: int, x: S, t: S, T, tol) -> S:
    """H(K, x, T) around x = 1 where lambda -> 1 and every factor vanishes.

    Writing ``1 - l x^m = (1 - x^m) + (1-l) x^m`` makes each factor O(e);
    one power of e is divided out of all four before taking the ratio.
    """
    lam = lambda_series(x, T, tol)
    kappa = 1 - lam
    c0 = kappa.coeffs[0]
    if abs(c0) > tol:
        raise SeriesError(f"lambda does not tend to 1 at x = 1 (1 - lambda = {c0})")
    kappa = S([0] + list(kappa.coeffs[1:]), kappa.order)

    def factor(m: int) -> S:
        one_minus_xm = t * q_int(m, x) if m else 0 * t
        return (one_minus_xm + kappa * x**m).shift_down(1, tol)

    num = factor(K - 1) * factor(K + 4)
    den = factor(K + 1) * factor(K + 2)
    return t_infinity(x) * num / den


def singular_extract(quantity: str, k: int, d: int | None = None, *,
                     order: int = 10, precision: int = DEFAULT_PRECISION,
                     check: bool = True) -> SingularExpansion:
    """Expansion at the critical point of one of ``F``, ``G`` or ``H_Td``.

    * ``F``: F(k, g) in eps = (1-12g)^(1/4).
    * ``G``: G(k, d, g, 1/12, 1) in eps, built from H with constant T = T_d(1).
    * ``H_Td``: H(k-d, 1, T_d(y)) in eta = (1-12h)^(1/4) (the ``d`` argument is the depth).
    * ``Y_Td``: Y(T_d(y)) in eta, for the depth-d slice generating function.

    With ``check`` set, coefficients of eps^1, eps^2, eps^3 and eps^5 must
    vanish to working precision, otherwise :class:`SeriesError` is raised.
    """
    if precision < MIN_SINGULAR_PRECISION:
        raise ValueError(f"singular expansions need at least {MIN_SINGULAR_PRECISION} digits")
    tol = mpmath.mpf(10) ** (-(precision - 10))
    with mpmath.workdps(precision):
        tol = mpmath.mpf(10) ** (-(precision - 10))
        if quantity == "F":
            t = one_minus_x_of_e(order)
            res = F_of_x(k, 1 - t)
            variable = "eps"
            label = f"F(k={k})"
        elif quantity == "G":
            if d is None:
                raise ValueError("G needs d")
            work = order + 4
            t = one_minus_x_of_e(work).map(lambda c: bigfloat(c, precision))
            x = 1 - t
            parts = [_H_near_one(k - d, x, t, bigfloat(slice_gf_at_one(dd), precision), tol)
                     for dd in (d, d - 1)]
            res = (parts[0] - parts[1]).truncate(order)
            variable = "eps"
            label = f"G(k={k},d={d},h=1/12,alpha=1)"
        elif quantity in ("H_Td", "Y_Td"):
            if d is None:
                raise ValueError(f"{quantity} needs d")
            t = one_minus_x_of_e(order)
            Td = slice_gf(d, 1 - t)
            res = Y_of_T(Td) if quantity == "Y_Td" else H_at_x_one(k - d, Td)
            variable = "eta"
            label = (f"Y(T_{d}(y))" if quantity == "Y_Td" else f"H(k-d={k - d},1,T_{d}(y))")
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
        coeffs = _e_series_to_eps(res, precision)
    exp = SingularExpansion(label, variable, coeffs, precision)
    if check:
        scale = max(1, max(abs(c) for c in coeffs))
        for n, c in exp.spurious_terms().items():
            if abs(c) > tol * scale * 1e4:
                raise SeriesError(f"spurious {variable}^{n} term {mpmath.nstr(c, 8)} in {label}")
    return exp
