"""Exact rationals, truncated power series and big floats.

Every generating-function computation in the package runs on
:class:`TruncatedSeries`.  Coefficients may be :class:`fractions.Fraction`
(exact work around ``g = 0``), :class:`mpmath.mpf` (singular expansions at
the critical point) or another :class:`TruncatedSeries` (nested series in a
second variable).  A series of ``order`` n stores exactly n coefficients;
the terms of degree ``>= n`` are unknown, not zero.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath

BigRational = Fraction

DEFAULT_PRECISION = int(os.environ.get("HULLSTATS_PRECISION", "40"))
MIN_SINGULAR_PRECISION = 30


class SeriesError(ArithmeticError):
    """Raised for operations that have no power-series answer."""


def bigfloat(value, precision: int | None = None) -> mpmath.mpf:
    """Convert ``value`` (int, Fraction, str, float) to an mpf.

    Fractions are converted through their numerator and denominator so no
    binary rounding sneaks in.  ``precision`` is in decimal digits and only
    matters for the conversion itself; arithmetic later uses the ambient
    ``mpmath.mp.dps``.
    """
    if precision is None:
        precision = mpmath.mp.dps
    with mpmath.workdps(precision):
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(value)


def rational_from_string(text: str) -> Fraction:
    return Fraction(text.strip())


def isqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if q < 0:
        return None
    q = Fraction(q)
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _int_root(n: int, k: int) -> int | None:
    r = round(n ** (1.0 / k)) if n < 2**1000 else int(mpmath.floor(mpmath.root(n, k)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _exact_root(q: Fraction, k: int) -> Fraction | None:
    if q < 0:
        return None
    a, b = _int_root(q.numerator, k), _int_root(q.denominator, k)
    if a is None or b is None:
        return None
    return Fraction(a, b)


# -- coefficient-level helpers -------------------------------------------------

def _is_zero(c, tol=0) -> bool:
    if isinstance(c, TruncatedSeries):
        return c.is_zero(tol)
    if tol:
        return abs(c) <= tol
    return c == 0


def _coeff_inv(c):
    if isinstance(c, TruncatedSeries):
        return ps_div(1, c)
    if _is_zero(c):
        raise SeriesError("constant term is zero; series is not invertible")
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


def _coeff_sqrt(c):
    if isinstance(c, TruncatedSeries):
        return ps_sqrt(c)
    if isinstance(c, (int, Fraction)):
        root = isqrt_fraction(Fraction(c))
        if root is None:
            raise SeriesError(
                f"constant term {c} is not a rational square; "
                "switch to BigFloat (mpmath) coefficients"
            )
        return root
    if c < 0:
        raise SeriesError(f"negative constant term {c} under a square root")
    return mpmath.sqrt(c)


def _coeff_pow(c, p: Fraction):
    if isinstance(c, TruncatedSeries):
        return ps_pow(c, p)
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        if p.denominator == 1:
            return c ** p.numerator
        root = _exact_root(c, p.denominator)
        if root is None:
            raise SeriesError(f"{c}**(1/{p.denominator}) is not rational")
        return root ** p.numerator
    return mpmath.power(c, mpmath.mpf(p.numerator) / p.denominator)


# -- the series type -----------------------------------------------------------

class TruncatedSeries:
    """Power series ``sum c_i t^i + O(t^order)``.

    Immutable after construction.  Scalars (int, Fraction, mpf) mix freely
    with series in arithmetic and are treated as exact constants.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        if order < 0:
            raise ValueError("order must be non-negative")
        coeffs = coeffs[:order] + [0] * (order - len(coeffs))
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # construction helpers
    @classmethod
    def variable(cls, order: int, one=1) -> "TruncatedSeries":
        return cls([0, one], order)

    @classmethod
    def constant(cls, value, order: int) -> "TruncatedSeries":
        return cls([value], order)

    @classmethod
    def from_polynomial(cls, coeffs: Sequence, order: int) -> "TruncatedSeries":
        return cls(list(coeffs)[:order], order)

    # inspection
    def __len__(self) -> int:
        return self.order

    def __getitem__(self, n: int):
        if n < 0:
            return 0
        if n >= self.order:
            raise IndexError(f"coefficient {n} is beyond truncation order {self.order}")
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self, tol=0) -> bool:
        return all(_is_zero(c, tol) for c in self.coeffs)

    def valuation(self, tol=0) -> int:
        """Index of the first coefficient that is not (numerically) zero.

        Returns ``order`` when every known coefficient vanishes.
        """
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c, tol):
                return i
        return self.order

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, min(order, self.order))

    def map(self, fn: Callable) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coeffs], self.order)

    def shift_down(self, v: int, tol=0) -> "TruncatedSeries":
        """Divide by ``t**v``; the dropped coefficients must vanish within tol."""
        for c in self.coeffs[:v]:
            if not _is_zero(c, tol):
                raise SeriesError(f"cannot divide by t^{v}: coefficient {c} is not zero")
        return TruncatedSeries(self.coeffs[v:], max(self.order - v, 0))

    def shift_up(self, v: int) -> "TruncatedSeries":
        return TruncatedSeries([0] * v + list(self.coeffs), self.order + v)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries([i * c for i, c in enumerate(self.coeffs)][1:],
                               max(self.order - 1, 0))

    def __call__(self, value):
        """Evaluate the known part at a scalar or compose with a series."""
        if isinstance(value, TruncatedSeries):
            return ps_compose(self, value)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            terms.append(f"{c}" if i == 0 else f"({c})*t^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(t^{self.order})"

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return all(_is_zero(a - b) for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        return NotImplemented

    __hash__ = None

    # arithmetic
    def __add__(self, other):
        return ps_arith(self, other, "add")

    def __radd__(self, other):
        return ps_arith(other, self, "add")

    def __sub__(self, other):
        return ps_arith(self, other, "sub")

    def __rsub__(self, other):
        return ps_arith(other, self, "sub")

    def __mul__(self, other):
        return ps_arith(self, other, "mul")

    def __rmul__(self, other):
        return ps_arith(other, self, "mul")

    def __truediv__(self, other):
        return ps_arith(self, other, "div")

    def __rtruediv__(self, other):
        return ps_arith(other, self, "div")

    def __neg__(self):
        return self.map(lambda c: -c)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return ps_div(1, self ** (-n))
            result = TruncatedSeries([1], self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return ps_pow(self, Fraction(n))


def _as_series(x, order: int) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return TruncatedSeries([x], order)


def ps_arith(a, b, op: str) -> TruncatedSeries:
    """Add, subtract, multiply or divide two series (or a series and a scalar)."""
    if not isinstance(a, TruncatedSeries) and not isinstance(b, TruncatedSeries):
        raise TypeError("ps_arith needs at least one TruncatedSeries operand")
    if op in ("add", "sub"):
        if not isinstance(b, TruncatedSeries):
            coeffs = list(a.coeffs)
            if a.order:
                coeffs[0] = coeffs[0] + b if op == "add" else coeffs[0] - b
            return TruncatedSeries(coeffs, a.order)
        if not isinstance(a, TruncatedSeries):
            neg = -b if op == "sub" else b
            coeffs = list(neg.coeffs)
            if b.order:
                coeffs[0] = a + coeffs[0]
            return TruncatedSeries(coeffs, b.order)
        n = min(a.order, b.order)
        if op == "add":
            return TruncatedSeries([x + y for x, y in zip(a.coeffs[:n], b.coeffs[:n])], n)
        return TruncatedSeries([x - y for x, y in zip(a.coeffs[:n], b.coeffs[:n])], n)
    if op == "mul":
        return ps_mul(a, b)
    if op == "div":
        return ps_div(a, b)
    raise ValueError(f"unknown operation {op!r}")


def ps_mul(a, b) -> TruncatedSeries:
    if not isinstance(b, TruncatedSeries):
        return TruncatedSeries([c * b for c in a.coeffs], a.order)
    if not isinstance(a, TruncatedSeries):
        return TruncatedSeries([a * c for c in b.coeffs], b.order)
    va, vb = a.valuation(), b.valuation()
    n = min(a.order + vb, b.order + va)
    out = [0] * n
    ac, bc = a.coeffs, b.coeffs
    for i in range(va, min(a.order, n)):
        ai = ac[i]
        if _is_zero(ai):
            continue
        for j in range(vb, min(b.order, n - i)):
            bj = bc[j]
            if _is_zero(bj):
                continue
            out[i + j] = out[i + j] + ai * bj
    return TruncatedSeries(out, n)


def ps_div(a, b) -> TruncatedSeries:
    """Series quotient ``a / b``; ``b`` needs an invertible constant term."""
    if not isinstance(b, TruncatedSeries):
        return ps_mul(a, _coeff_inv(b))
    if b.order == 0:
        raise SeriesError("division by a series with no known coefficients")
    if _is_zero(b.coeffs[0]):
        raise SeriesError("division by a series with zero constant term")
    if isinstance(a, TruncatedSeries):
        n = min(a.order, b.order + a.valuation())
        num = list(a.coeffs[:n])
    else:
        n = b.order
        num = [a] + [0] * (n - 1)
    inv0 = _coeff_inv(b.coeffs[0])
    q = [0] * n
    bc = b.coeffs
    for i in range(n):
        acc = num[i]
        for j in range(1, min(i, b.order - 1) + 1):
            if not _is_zero(bc[j]) and not _is_zero(q[i - j]):
                acc = acc - bc[j] * q[i - j]
        q[i] = acc * inv0
    return TruncatedSeries(q, n)


def ps_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """``outer(inner(t))`` for an inner series with zero constant term."""
    if inner.order and not _is_zero(inner.coeffs[0]):
        raise SeriesError("inner series must have zero constant term")
    v = inner.valuation()
    n = inner.order if v >= inner.order else min(inner.order, outer.order * v)
    inner_n = inner.truncate(n)
    acc = TruncatedSeries([0], n)
    for c in reversed(outer.coeffs):
        acc = (acc * inner_n + c).truncate(n)
    return acc


def ps_reverse(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse r with ``s(r(t)) = t`` to the truncation order."""
    n = s.order
    if n < 2 or not _is_zero(s.coeffs[0]):
        raise SeriesError("reversion needs zero constant term and a known linear term")
    s1 = s.coeffs[1]
    if _is_zero(s1):
        raise SeriesError("reversion needs an invertible linear coefficient")
    inv1 = _coeff_inv(s1)
    # r_{m+1} = (t - (s(r_m) - s1 r_m)) / s1 gains one correct order per pass
    t = TruncatedSeries.variable(n)
    nonlinear = TruncatedSeries([0, 0] + list(s.coeffs[2:]), n)
    r = t * inv1
    for _ in range(n):
        r_new = (t - ps_compose(nonlinear, r)) * inv1
        if r_new == r:
            r = r_new
            break
        r = r_new
    return r


def ps_pow(s: TruncatedSeries, p: Fraction) -> TruncatedSeries:
    """``s**p`` for rational p via the J.C.P. Miller recurrence."""
    p = Fraction(p)
    n = s.order
    if n == 0:
        return s
    s0 = s.coeffs[0]
    if _is_zero(s0):
        raise SeriesError("rational power of a series with zero constant term")
    f = [0] * n
    f[0] = _coeff_pow(s0, p)
    inv_s0 = _coeff_inv(s0)
    for m in range(1, n):
        acc = 0
        for k in range(1, m + 1):
            sk = s.coeffs[k]
            if _is_zero(sk):
                continue
            weight = (p + 1) * k - m
            if weight:
                acc = acc + sk * weight * f[m - k]
        f[m] = acc * inv_s0 * Fraction(1, m)
    return TruncatedSeries(f, n)


def ps_sqrt(s: TruncatedSeries, tol=0) -> TruncatedSeries:
    """Square root with the positive (principal) leading coefficient.

    A series of even valuation 2v is handled as ``t**v * sqrt(s / t**(2v))``;
    ``tol`` decides which leading coefficients count as zero (BigFloat mode).
    """
    v = s.valuation(tol)
    if v >= s.order:
        raise SeriesError("square root of a series with no nonzero known coefficient")
    if v % 2:
        raise SeriesError("square root of a series with odd valuation")
    if v:
        return ps_sqrt(s.shift_down(v, tol)).shift_up(v // 2)
    n = s.order
    r = [0] * n
    r[0] = _coeff_sqrt(s.coeffs[0])
    inv2r0 = _coeff_inv(2 * r[0])
    for m in range(1, n):
        acc = s.coeffs[m]
        for i in range(1, m):
            if not _is_zero(r[i]) and not _is_zero(r[m - i]):
                acc = acc - r[i] * r[m - i]
        r[m] = acc * inv2r0
    return TruncatedSeries(r, n)


def ps_exp_of_zero_const(s: TruncatedSeries) -> TruncatedSeries:
    """exp(s) for a series with zero constant term (exact coefficients stay exact)."""
    if s.order and not _is_zero(s.coeffs[0]):
        raise SeriesError("exp needs zero constant term for exact coefficients")
    n = s.order
    e = [0] * n
    if n:
        e[0] = 1
    for m in range(1, n):
        acc = 0
        for k in range(1, m + 1):
            if not _is_zero(s.coeffs[k]):
                acc = acc + k * s.coeffs[k] * e[m - k]
        e[m] = acc * Fraction(1, m)
    return TruncatedSeries(e, n)


def polyval_series(poly: Sequence, x: TruncatedSeries) -> TruncatedSeries:
    """Evaluate a polynomial with scalar coefficients (low degree first) at a series."""
    acc = TruncatedSeries([0], x.order)
    for c in reversed(poly):
        acc = acc * x + c
    return acc
