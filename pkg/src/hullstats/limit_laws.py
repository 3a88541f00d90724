"""Universal laws in the limit k, d -> infinity at fixed u = d/k.

Conventions: ``L`` is the rescaled hull perimeter (perimeter / d^2),
``X = u^2 L / ((1-u)^2 c)`` and ``B = (1-u)^2 / u^2`` so that ``B X = L/c``.
All densities are in the variable ``L``.  Every function takes the family
(for the constants c and f) and accepts an explicit ``c`` override, which
the Monte Carlo fitted-constant mode uses.

Expressions of the form ``e^X (1 - erf(sqrt X))`` go through
:func:`scipy.special.erfcx`.  Near ``mu = 0`` the Laplace kernels switch to
their exact Taylor series, and for large ``X`` the brackets, which cancel
badly, are recomputed with mpmath at raised precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import wraps

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import erfcx

from .families import Family

SQRT_PI = math.sqrt(math.pi)
_MP_DPS = 50
_SMALL_MU = 0.25
_LARGE_X = 20.0
_SERIES_TERMS = 90


def _vectorized(fn):
    """Apply a scalar function elementwise when any positional argument is an array."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        if any(isinstance(a, (np.ndarray, list, tuple)) for a in args):
            arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
            out = np.empty(arrays[0].shape)
            for idx in np.ndindex(out.shape):
                out[idx] = fn(*(float(a[idx]) for a in arrays), **kwargs)
            return out
        return fn(*args, **kwargs)
    return wrapper


def _c(family, c):
    return Family.parse(family).c if c is None else float(c)


def _f(family, f):
    return Family.parse(family).f if f is None else float(f)


def _check_u(u, open_interval=False):
    if open_interval and not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u}")


def B_of_u(u: float) -> float:
    return (1.0 - u) ** 2 / u**2


def X_of_L(L: float, u: float, c: float) -> float:
    return u**2 * L / ((1.0 - u) ** 2 * c)


# -- regime probabilities -----------------------------------------------------------

def regime_probability(u: float, regime: str = "out") -> float:
    """``p_out = (4 - 7u^6 + 3u^7)/4`` and ``p_in = (7 - 3u) u^6 / 4``; family independent."""
    _check_u(u)
    if regime == "out":
        return (4.0 - 7.0 * u**6 + 3.0 * u**7) / 4.0
    if regime == "in":
        return (7.0 - 3.0 * u) * u**6 / 4.0
    raise ValueError("regime must be 'out' or 'in'")


# -- Laplace kernels ------------------------------------------------------------------

def _M_closed(mu, sqrt=math.sqrt):
    num = 4 * mu**5 + 16 * mu**4 - 7 * mu**2 - 40 * mu - 24
    return (3 * mu**2 - 5 * mu + 6 + num / (4 * sqrt(1 + mu) ** 5)) / mu**4


def _Q_closed(mu, B, sqrt=math.sqrt):
    num = 4 * mu**3 + 3 * B * mu**2 + 20 * mu**2 + 24 * B * mu + 16 * mu + 24 * B
    return (-3 * mu**2 - 3 * B * mu - 4 * mu - 6 * B + num / (4 * sqrt(1 + mu))) / mu**4


def _binom_series(alpha: Fraction, n: int) -> list[Fraction]:
    """Coefficients of ``(1 + mu)^alpha`` up to ``mu^(n-1)``."""
    out = [Fraction(1)]
    for j in range(1, n):
        out.append(out[-1] * (alpha - j + 1) / j)
    return out


def _kernel_series(poly, alpha, const, n=_SERIES_TERMS):
    """Taylor coefficients of ``(const(mu) + poly(mu) (1+mu)^alpha / 4) / mu^4``.

    ``poly`` and ``const`` are ascending coefficient lists; the combined
    numerator vanishes to order mu^4, which is checked.
    """
    b = _binom_series(Fraction(alpha), n + 4)
    num = [Fraction(0)] * (n + 4)
    for i, p in enumerate(poly):
        for j in range(n + 4 - i):
            num[i + j] += Fraction(p) * b[j] / 4
    for i, p in enumerate(const):
        num[i] += p
    if any(num[:4]):
        raise ArithmeticError("kernel numerator does not vanish to fourth order")
    return np.array([float(v) for v in num[4:]])


# M: (3mu^2 - 5mu + 6) + (4mu^5 + 16mu^4 - 7mu^2 - 40mu - 24)(1+mu)^(-5/2)/4
_M_SERIES = _kernel_series([-24, -40, -7, 0, 16, 4], Fraction(-5, 2), [6, -5, 3])
# Q splits as Q0 + B Q1:
#   Q0: (-3mu^2 - 4mu) + (4mu^3 + 20mu^2 + 16mu)(1+mu)^(-1/2)/4
#   Q1: (-3mu - 6) + (3mu^2 + 24mu + 24)(1+mu)^(-1/2)/4
_Q0_SERIES = _kernel_series([0, 16, 20, 4], Fraction(-1, 2), [0, -4, -3])
_Q1_SERIES = _kernel_series([24, 24, 3], Fraction(-1, 2), [-6, -3])


def _horner(coeffs, x):
    return float(np.polynomial.polynomial.polyval(x, coeffs))


@_vectorized
def M(mu: float) -> float:
    """Laplace transform of :func:`M_check`; finite at ``mu = 0``."""
    if mu <= -1:
        raise ValueError("M needs mu > -1")
    if abs(mu) < _SMALL_MU:
        return _horner(_M_SERIES, mu)
    return _M_closed(mu)


@_vectorized
def Q(mu: float, B: float) -> float:
    """Laplace transform of :func:`Q_check` at fixed ``B``."""
    if mu <= -1:
        raise ValueError("Q needs mu > -1")
    if abs(mu) < _SMALL_MU:
        return _horner(_Q0_SERIES, mu) + B * _horner(_Q1_SERIES, mu)
    return _Q_closed(mu, B)


def _out_bracket(X):
    """``-2 sqrt(X)((X-10)X-2) + sqrt(pi) X (X(2X-5)+6) erfcx(sqrt X)``."""
    if X > _LARGE_X:
        with mpmath.workdps(_MP_DPS):
            x = mpmath.mpf(X)
            y = mpmath.sqrt(x)
            val = (-2 * y * ((x - 10) * x - 2)
                   + mpmath.sqrt(mpmath.pi) * x * (x * (2 * x - 5) + 6) * mpmath.erfc(y) * mpmath.exp(x))
            return float(val)
    y = math.sqrt(X)
    return -2 * y * ((X - 10) * X - 2) + SQRT_PI * X * (X * (2 * X - 5) + 6) * erfcx(y)


def _in_bracket(X):
    """``2 sqrt(X)(X+1) - sqrt(pi) X (2X+3) erfcx(sqrt X)``; cancels to O(X^-3/2)."""
    if X > _LARGE_X:
        with mpmath.workdps(_MP_DPS):
            x = mpmath.mpf(X)
            y = mpmath.sqrt(x)
            val = 2 * y * (x + 1) - mpmath.sqrt(mpmath.pi) * x * (2 * x + 3) * mpmath.erfc(y) * mpmath.exp(x)
            return float(val)
    y = math.sqrt(X)
    return 2 * y * (X + 1) - SQRT_PI * X * (2 * X + 3) * erfcx(y)


@_vectorized
def M_check(X: float) -> float:
    """Inverse Laplace transform of :func:`M` (density in X)."""
    if X < 0:
        raise ValueError("M_check needs X >= 0")
    return math.exp(-X) / (2 * SQRT_PI) * _out_bracket(X)


@_vectorized
def Q_check(X: float, B: float) -> float:
    """Inverse Laplace transform of :func:`Q` in mu at fixed B."""
    if X < 0:
        raise ValueError("Q_check needs X >= 0")
    return math.exp(-X) / (2 * SQRT_PI) * (B * X + 2) * _in_bracket(X)


def laplace_kernels(kind: str, *args):
    """Dispatch by name: ``"M"``, ``"M_check"``, ``"Q"``, ``"Q_check"``."""
    table = {"M": M, "M_check": M_check, "Q": Q, "Q_check": Q_check,
             "Mcheck": M_check, "Qcheck": Q_check}
    try:
        return table[kind](*args)
    except KeyError:
        raise ValueError(f"unknown kernel {kind!r}") from None


# -- perimeter densities --------------------------------------------------------------

@_vectorized
def _density_out(L, u, c):
    if L <= 0:
        return 0.0
    B = B_of_u(u)
    X = X_of_L(L, u, c)
    return (1 - u) ** 4 / (2 * c * SQRT_PI * u) * math.exp(-B * X) * _out_bracket(X)


@_vectorized
def _density_in(L, u, c):
    if L <= 0:
        return 0.0
    B = B_of_u(u)
    X = X_of_L(L, u, c)
    return (u**5 / (2 * c * SQRT_PI * (1 - u) ** 2) * math.exp(-B * X) * (B * X + 2)
            * _in_bracket(X))


def perimeter_density(L, u: float, regime: str = "total", family=Family.QUADRANGULATION, c=None):
    """Joint density of (regime, L): ``D_out``, ``D_in`` or their sum."""
    _check_u(u, open_interval=True)
    cc = _c(family, c)
    if regime == "out":
        return _density_out(L, u, cc)
    if regime == "in":
        return _density_in(L, u, cc)
    if regime == "total":
        return _density_out(L, u, cc) + _density_in(L, u, cc)
    raise ValueError("regime must be 'out', 'in' or 'total'")


def perimeter_density_limit(x, which: str, family=Family.QUADRANGULATION, c=None):
    """Limits of the conditional densities.

    ``out_u0``, ``out_u1``, ``in_u0`` are densities in L; ``in_u1_X`` is the
    u -> 1 in-regime law in the variable ``X = perimeter / (c (k^2 - d^2))``.
    """
    cc = _c(family, c)
    x = np.asarray(x, dtype=float)
    e = np.exp(-x / cc)
    if which == "out_u0":
        out = 2 * np.sqrt(x) * e / (cc**1.5 * SQRT_PI)
    elif which == "out_u1":
        out = (4.0 / 3.0) * x**1.5 * e / (cc**2.5 * SQRT_PI)
    elif which == "in_u0":
        out = (4.0 / 7.0) * np.sqrt(x) * (2 * cc + x) * e / (cc**2.5 * SQRT_PI)
    elif which == "in_u1_X":
        out = np.vectorize(lambda X: _in_bracket(X) / SQRT_PI if X > 0 else 0.0)(x)
    else:
        raise ValueError(f"unknown limit {which!r}")
    return float(out) if out.ndim == 0 else out


def integrate_L(fn, scales=(), upper=np.inf) -> float:
    """``int_0^upper fn(L) dL`` split at the natural scales of the integrand.

    The densities have structure at ``L ~ c B`` and decay like ``e^(-L/c)``;
    passing both scales keeps adaptive quadrature from stepping over either.
    """
    pts = sorted({s * m for s in scales if s > 0 for m in (0.1, 1.0, 10.0, 60.0)})
    pts = [p for p in pts if p < upper]
    edges = [0.0] + pts
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(fn, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    total += integrate.quad(fn, edges[-1], upper, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return total


def density_scales(u: float, c: float):
    return (c, c * B_of_u(u))


def regime_posterior(L: float, u: float, family=Family.QUADRANGULATION, c=None) -> tuple[float, float]:
    """``(pi_out, pi_in)``: regime probabilities knowing the rescaled perimeter."""
    _check_u(u)
    cc = _c(family, c)
    if u == 0:
        return 1.0, 0.0
    if u == 1:
        p = 28 * L**3 / (6 * cc**3 + 3 * L * cc**2 + 28 * L**3) if L > 0 else 0.0
        return p, 1.0 - p
    X = X_of_L(L, u, cc) if L > 0 else 0.0
    if X == 0.0:
        p = (1 - u) ** 6 / ((1 - 2 * u + 2 * u**2) * (1 - 4 * u + 5 * u**2 - 2 * u**3 + u**4))
        return p, 1.0 - p
    # both densities carry exp(-B X); drop it so large L does not underflow
    B = B_of_u(u)
    do = (1 - u) ** 4 / u * _out_bracket(X)
    di = u**5 / (1 - u) ** 2 * (B * X + 2) * _in_bracket(X)
    p = float(do / (do + di))
    return p, 1.0 - p


def perimeter_expectation_limit(u: float, regime: str = "none", family=Family.QUADRANGULATION, c=None) -> float:
    """Mean rescaled perimeter: conditioned on out, on in, or unconditioned (``none``)."""
    _check_u(u)
    cc = _c(family, c)
    if regime == "out":
        return (3 * cc * (4 + 4 * u - 21 * u**6 + 17 * u**7 - 4 * u**8)
                / (2 * (4 - 7 * u**6 + 3 * u**7)))
    if regime == "in":
        if u == 0:
            return 3 * cc * 9 / 14
        return 3 * cc * (9 - 4 * u) * (1 - u) / (2 * (7 - 3 * u))
    if regime in ("none", "total"):
        return 1.5 * cc * (1 + u - 3 * u**6 + u**7)
    raise ValueError("regime must be 'out', 'in' or 'none'")


# -- joint perimeter/volume transform ---------------------------------------------------
#
# The transform depends on sigma only through w = z^2 = sqrt(f sigma)/4 and is
# real-analytic in w across w = 0 (w < 0 turns the hyperbolic functions into
# circular ones).  That lets the volume mean be taken by a central difference.

def _zcoth(w):
    """``z / tanh z`` as a function of ``w = z^2``."""
    if abs(w) < 1e-4:
        return 1 + w / 3 - w**2 / 45 + 2 * w**3 / 945
    if w > 0:
        z = math.sqrt(w)
        return z / math.tanh(z)
    y = math.sqrt(-w)
    return y / math.tan(y)


def _zcsch2(w):
    """``(z / sinh z)^2`` as a function of ``w = z^2``."""
    if abs(w) < 1e-4:
        return 1 - w / 3 + w**2 / 15 - 2 * w**3 / 189
    if w > 0:
        z = math.sqrt(w)
        return w / math.sinh(z) ** 2
    y = math.sqrt(-w)
    return -w / math.sin(y) ** 2


def volume_factors_w(w: float) -> tuple[float, float]:
    """``(P, A)`` with ``P = (z/sinh z)^2 (z/tanh z)`` and ``A = (z/tanh z)^2 - 2 z^2/3``."""
    zc = _zcoth(w)
    return _zcsch2(w) * zc, zc * zc - 2.0 * w / 3.0


def w_of_sigma(sigma: float, f: float) -> float:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return math.sqrt(f * sigma) / 4.0


def volume_factors(sigma: float, family=Family.QUADRANGULATION, f=None) -> tuple[float, float]:
    return volume_factors_w(w_of_sigma(sigma, _f(family, f)))


def W_of_sigma(sigma: float) -> float:
    """``e^(sqrt 6 sigma^(1/4)) - 1``, the quadrangulation weight variable."""
    return math.expm1(math.sqrt(6.0) * sigma**0.25)


def mu_of(sigma: float, tau: float, u: float, family=Family.QUADRANGULATION, c=None, f=None) -> float:
    """``mu = B (c tau + A(sigma)) - 1``."""
    _, A = volume_factors(sigma, family, f)
    return B_of_u(u) * (_c(family, c) * tau + A) - 1.0


def _joint_w(w, tau, u, c):
    P, A = volume_factors_w(w)
    if u == 0:
        return P * (c * tau + A) ** -1.5
    B = B_of_u(u)
    mu = B * (c * tau + A) - 1.0
    return (1 - u) ** 6 / (u**3 * regime_probability(u, "out")) * P * M(mu)


def joint_laplace(sigma: float, tau: float, u: float, family=Family.QUADRANGULATION, c=None, f=None) -> float:
    """``E[exp(-sigma V - tau L) | out]`` at fixed u (u = 0 uses the limit form)."""
    if not 0.0 <= u < 1.0:
        raise ValueError("joint_laplace needs 0 <= u < 1")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return _joint_w(w_of_sigma(sigma, _f(family, f)), tau, u, _c(family, c))


def perimeter_laplace_out(tau: float, u: float, family=Family.QUADRANGULATION, c=None) -> float:
    """Unnormalized ``(1-u)^6/u^3 M(mu(0, tau, u))``: the Laplace transform of D_out in L."""
    _check_u(u, open_interval=True)
    return (1 - u) ** 6 / u**3 * M(B_of_u(u) * (_c(family, c) * tau + 1.0) - 1.0)


def perimeter_laplace_in(tau: float, u: float, family=Family.QUADRANGULATION, c=None) -> float:
    """``u^3 Q(mu(0, tau, u), B)``: the Laplace transform of D_in in L."""
    _check_u(u, open_interval=True)
    B = B_of_u(u)
    return u**3 * Q(B * (_c(family, c) * tau + 1.0) - 1.0, B)


def mean_volume_out(u: float, family=Family.QUADRANGULATION, f=None) -> float:
    """``E[V | out] = f (20 + 12u - 77u^6 + 57u^7 - 12u^8) / (480 (4 - 7u^6 + 3u^7))``."""
    _check_u(u)
    ff = _f(family, f)
    if u == 1:
        return 7 * ff / 480
    return ff * (20 + 12 * u - 77 * u**6 + 57 * u**7 - 12 * u**8) / (480 * (4 - 7 * u**6 + 3 * u**7))


def mean_volume_numeric(u: float, family=Family.QUADRANGULATION, c=None, f=None, h: float = 2e-3) -> float:
    """``-d/dsigma`` of :func:`joint_laplace` at sigma = tau = 0, by finite differences.

    With ``w = sqrt(f sigma)/4`` the transform is ``G(w) = 1 + G''(0) w^2/2 + ...``
    so the mean is ``-f G''(0) / 32``.  ``G''(0)`` is a central second
    difference in w, Richardson-extrapolated over steps h and h/2.
    """
    cc, ff = _c(family, c), _f(family, f)

    def second(step):
        g0 = _joint_w(0.0, 0.0, u, cc)
        return (_joint_w(step, 0.0, u, cc) - 2 * g0 + _joint_w(-step, 0.0, u, cc)) / step**2

    g2 = (4 * second(h / 2) - second(h)) / 3
    return -ff * g2 / 32


def volume_laplace_given_L(sigma: float, L: float, family=Family.QUADRANGULATION, c=None, f=None) -> float:
    """``E[exp(-sigma V) | L] = P(sigma) exp(-(L/c)(A(sigma) - 1))``, the same for every u."""
    if L < 0:
        raise ValueError("L must be >= 0")
    P, A = volume_factors(sigma, family, f)
    return P * math.exp(-(L / _c(family, c)) * (A - 1.0))


def volume_laplace_given_L_ratio(sigma: float, L: float, u: float, family=Family.QUADRANGULATION,
                                 c=None, f=None) -> float:
    """The same law rebuilt at a given u from the joint transform.

    Inverting the joint transform in tau gives the density of L weighted by
    ``E[exp(-sigma V) | L]``; dividing by ``D_out(L, u)`` leaves the
    conditional transform.  Agreement with :func:`volume_laplace_given_L`
    over several u is the u-independence check.
    """
    _check_u(u, open_interval=True)
    cc = _c(family, c)
    P, A = volume_factors(sigma, family, f)
    B = B_of_u(u)
    X = L / (cc * B)
    weighted = ((1 - u) ** 6 / u**3 * P * math.exp(-A * B * X) / (2 * SQRT_PI) * _out_bracket(X) / (cc * B))
    return weighted / float(_density_out(L, u, cc))


def mean_volume_given_L(L: float, family=Family.QUADRANGULATION, c=None, f=None) -> float:
    cc, ff = _c(family, c), _f(family, f)
    return ff * (cc + L) / (240 * cc)


def conditional_volume_mean_numeric(L: float, family=Family.QUADRANGULATION, c=None, f=None,
                                    h: float = 2e-3) -> float:
    """``-d/dsigma`` of :func:`volume_laplace_given_L` at 0, by the same w-difference as the joint mean."""
    cc, ff = _c(family, c), _f(family, f)

    def g(w):
        P, A = volume_factors_w(w)
        return P * math.exp(-(L / cc) * (A - 1.0))

    def second(step):
        return (g(step) - 2 * g(0.0) + g(-step)) / step**2

    return -ff * (4 * second(h / 2) - second(h)) / 3 / 32


def complement_volume_mean(u: float, family=Family.QUADRANGULATION, f=None) -> float:
    """Mean rescaled volume of the complement in the in-regime."""
    _check_u(u)
    ff = _f(family, f)
    return (ff * (1 - u) * (14 + 16 * u + 16 * u**2 + 16 * u**3 - 39 * u**4 + 12 * u**5)
            / (480 * (7 - 3 * u)))


def cl_limit_transform(sigma: float, family=Family.QUADRANGULATION, f=None) -> float:
    """u -> 0 transform ``cosh z / (sinh^3 z (coth^2 z - 2/3)^(3/2))`` with ``z = (f sigma)^(1/4)/2``."""
    z = (_f(family, f) * sigma) ** 0.25 / 2
    if z == 0:
        return 1.0
    return math.cosh(z) / (math.sinh(z) ** 3 * (1 / math.tanh(z) ** 2 - 2.0 / 3.0) ** 1.5)
