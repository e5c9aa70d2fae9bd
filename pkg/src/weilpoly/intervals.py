"""Directed rational enclosures: intervals, complex boxes, and certified
enclosures of the handful of transcendental/algebraic scalars the package
needs (square roots, k-th roots, log, exp, pi, cos).

All endpoints are `fractions.Fraction`, so interval arithmetic here is
exact; "rounding" only ever happens outward, via `outward()`, to keep
denominators small in long computations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Ratlike = Union[int, Fraction]

_HALF = Fraction(1, 2)


def _frac(x: Ratlike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatInterval:
    """Closed interval [lo, hi] with rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Ratlike, hi: Ratlike | None = None):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @staticmethod
    def point(x: Ratlike) -> "RatInterval":
        return RatInterval(x)

    def __repr__(self):
        return f"RatInterval({self.lo}, {self.hi})"

    # -- queries ---------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Fraction:
        """max |x| over the interval."""
        return max(-self.lo, self.hi)

    @property
    def mig(self) -> Fraction:
        """min |x| over the interval."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(-self.lo, self.hi) if self.hi < 0 else min(self.lo, self.hi)

    def contains(self, x: Ratlike) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RatInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    # certain comparisons (False means "not certainly")
    def lt(self, other: "RatInterval | Ratlike") -> bool:
        o = other.lo if isinstance(other, RatInterval) else other
        return self.hi < o

    def gt(self, other: "RatInterval | Ratlike") -> bool:
        o = other.hi if isinstance(other, RatInterval) else other
        return self.lo > o

    # -- arithmetic ------------------------------------------------------

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __add__(self, other):
        if isinstance(other, RatInterval):
            return RatInterval(self.lo + other.lo, self.hi + other.hi)
        other = _frac(other)
        return RatInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, RatInterval) else -_frac(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RatInterval):
            ps = (self.lo * other.lo, self.lo * other.hi,
                  self.hi * other.lo, self.hi * other.hi)
            return RatInterval(min(ps), max(ps))
        other = _frac(other)
        if other >= 0:
            return RatInterval(self.lo * other, self.hi * other)
        return RatInterval(self.hi * other, self.lo * other)

    __rmul__ = __mul__

    def square(self) -> "RatInterval":
        if self.lo <= 0 <= self.hi:
            return RatInterval(0, max(self.lo * self.lo, self.hi * self.hi))
        a, b = self.lo * self.lo, self.hi * self.hi
        return RatInterval(min(a, b), max(a, b))

    def recip(self) -> "RatInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains 0")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        if isinstance(other, RatInterval):
            return self * other.recip()
        return self * (1 / _frac(other))

    def pow_int(self, k: int) -> "RatInterval":
        if k < 0:
            return self.recip().pow_int(-k)
        if k == 0:
            return RatInterval(1)
        if k % 2 == 0:
            half = self.pow_int(k // 2)
            return half.square()
        return self * self.pow_int(k - 1)

    # -- set ops / rounding ----------------------------------------------

    def hull(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(max(self.lo, other.lo), min(self.hi, other.hi))

    def outward(self, bits: int) -> "RatInterval":
        """Round endpoints outward to denominator 2**bits."""
        s = 1 << bits
        lo = Fraction(math.floor(self.lo * s), s)
        hi = Fraction(math.ceil(self.hi * s), s)
        return RatInterval(lo, hi)

    def __float__(self):
        return float(self.mid)


class ComplexBox:
    """Axis-aligned rectangle in C; arithmetic encloses complex arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatInterval, im: RatInterval):
        self.re = re
        self.im = im

    @staticmethod
    def point(re: Ratlike, im: Ratlike = 0) -> "ComplexBox":
        return ComplexBox(RatInterval(re), RatInterval(im))

    def __repr__(self):
        return f"ComplexBox({self.re}, {self.im})"

    def __add__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re + other.re, self.im + other.im)
        return ComplexBox(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re - other.re, self.im - other.im)
        return ComplexBox(self.re - other, self.im)

    def __mul__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re * other.re - self.im * other.im,
                              self.re * other.im + self.im * other.re)
        return ComplexBox(self.re * other, self.im * other)

    __rmul__ = __mul__

    def abs2(self) -> RatInterval:
        return self.re.square() + self.im.square()

    def contains_zero(self) -> bool:
        return self.re.contains(0) and self.im.contains(0)

    def outward(self, bits: int) -> "ComplexBox":
        return ComplexBox(self.re.outward(bits), self.im.outward(bits))


# ---------------------------------------------------------------------------
# integer k-th roots

def round_frac_down(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic with about `bits` significant bits that is <= x
    (x > 0); keeps lower bounds valid while capping Fraction growth."""
    if x <= 0:
        return x
    e = bits - (x.numerator.bit_length() - x.denominator.bit_length())
    if e <= 0:
        m = x.numerator // (x.denominator << -e)
        return Fraction(m << -e)
    m = (x.numerator << e) // x.denominator
    return Fraction(m, 1 << e)


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)  # upper-ish seed
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def sqrt_interval(x: "Ratlike | RatInterval", prec: int = 64) -> RatInterval:
    """Enclosure of sqrt(x) with width <= 2**-prec-ish."""
    if isinstance(x, RatInterval):
        if x.lo < 0:
            raise ValueError("sqrt of interval reaching below 0")
        return RatInterval(sqrt_interval(x.lo, prec).lo, sqrt_interval(x.hi, prec).hi)
    x = _frac(x)
    if x < 0:
        raise ValueError("sqrt of negative rational")
    s = 1 << prec
    # sqrt(a/b) = isqrt(a*b*s^2)/(b*s), with floor semantics
    lo_num = math.isqrt(x.numerator * x.denominator * s * s)
    lo = Fraction(lo_num, x.denominator * s)
    hi = Fraction(lo_num + 1, x.denominator * s)
    return RatInterval(lo, hi)


def nthroot_interval(x: "Ratlike | RatInterval", k: int, prec: int = 64) -> RatInterval:
    """Enclosure of x**(1/k), x >= 0."""
    if isinstance(x, RatInterval):
        return RatInterval(nthroot_interval(x.lo, k, prec).lo,
                           nthroot_interval(x.hi, k, prec).hi)
    x = _frac(x)
    if x < 0:
        raise ValueError("k-th root of negative rational")
    s = 1 << prec
    t = (x.numerator * s ** k) // x.denominator
    r = iroot(t, k)
    return RatInterval(Fraction(r, s), Fraction(r + 2, s))


# ---------------------------------------------------------------------------
# log

_LOG2_CACHE: dict[int, RatInterval] = {}


def _atanh_series(t: Fraction, prec: int) -> RatInterval:
    """Enclosure of atanh(t) = sum t^(2k+1)/(2k+1) for 0 <= t < 1.

    Partial sums increase and the tail bound used here nests as terms are
    added, so higher `prec` yields nested enclosures for fixed t.
    """
    assert 0 <= t < 1
    if t == 0:
        return RatInterval(0)
    t2 = t * t
    term = t
    s = Fraction(0)
    k = 0
    eps = Fraction(1, 1 << (prec + 2))
    while True:
        s += term / (2 * k + 1)
        k += 1
        term *= t2
        # tail <= term/(2k+1) * 1/(1-t2)
        tail = term / ((2 * k + 1) * (1 - t2))
        if tail < eps:
            return RatInterval(s, s + tail)


def _log2_interval(prec: int) -> RatInterval:
    got = _LOG2_CACHE.get(prec)
    if got is None:
        got = _atanh_series(Fraction(1, 3), prec + 2) * 2
        _LOG2_CACHE[prec] = got
    return got


def log_interval(x: "Ratlike | RatInterval", prec: int = 64) -> RatInterval:
    """Enclosure of log(x) for x > 0, of width <= ~2**-prec.

    For a fixed rational x the enclosures nest as prec increases.
    """
    if isinstance(x, RatInterval):
        if x.lo <= 0:
            raise ValueError("log of interval reaching <= 0")
        return RatInterval(log_interval(x.lo, prec).lo, log_interval(x.hi, prec).hi)
    x = _frac(x)
    if x <= 0:
        raise ValueError("log of nonpositive rational")
    if x == 1:
        return RatInterval(0)
    if x < 1:
        return -log_interval(1 / x, prec)
    # x = 2^k * b with b in [2/3, 4/3)
    k = 0
    b = x
    while b >= Fraction(4, 3):
        b /= 2
        k += 1
    # log b = 2 atanh((b-1)/(b+1)); may be negative (b < 1)
    t = (b - 1) / (b + 1)
    if t >= 0:
        lb = _atanh_series(t, prec + max(1, k).bit_length() + 1) * 2
    else:
        lb = -(_atanh_series(-t, prec + max(1, k).bit_length() + 1) * 2)
    if k == 0:
        return lb
    return _log2_interval(prec + k.bit_length() + 1) * k + lb


def log_ratio_interval(m: int, q: int, n: int, prec: int = 64) -> RatInterval:
    """Enclosure of log(m / q^n); exact 0 when m == q^n.

    Repeated calls with increasing prec produce nested enclosures.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    val = Fraction(m, q ** n)
    if val == 1:
        return RatInterval(0)
    return log_interval(val, prec)


# ---------------------------------------------------------------------------
# exp

def _exp_core(x: Fraction, prec: int) -> RatInterval:
    """Enclosure of exp(x) for |x| <= 1/2."""
    assert abs(x) <= _HALF
    eps = Fraction(1, 1 << (prec + 2))
    term = Fraction(1)
    s = Fraction(0)
    j = 0
    while True:
        s += term
        j += 1
        term = term * x / j
        # |tail| <= |term| / (1 - |x|) <= 2|term|
        tail = 2 * abs(term)
        if tail < eps:
            return RatInterval(s - tail, s + tail)


def exp_interval(x: "Ratlike | RatInterval", prec: int = 64) -> RatInterval:
    """Enclosure of exp(x)."""
    if isinstance(x, RatInterval):
        return RatInterval(exp_interval(x.lo, prec).lo, exp_interval(x.hi, prec).hi)
    x = _frac(x)
    k = 0
    while abs(x) > _HALF:
        x /= 2
        k += 1
    # extra precision: squaring k times multiplies relative error by ~2^k
    core = _exp_core(x, prec + 2 * k + 4)
    out = core
    for _ in range(k):
        out = out.square()
    return out.outward(prec + 8) if k > 6 else out


# ---------------------------------------------------------------------------
# pi and cos (used by the equilibrium-potential quadrature)

_PI_CACHE: dict[int, RatInterval] = {}


def _atan_inv(n: int, prec: int) -> RatInterval:
    """Enclosure of atan(1/n), n >= 2 (alternating series)."""
    t = Fraction(1, n)
    t2 = t * t
    term = t
    s = Fraction(0)
    k = 0
    eps = Fraction(1, 1 << (prec + 2))
    while True:
        s += term / (4 * k + 1) - term * t2 / (4 * k + 3)
        term *= t2 * t2
        k += 1
        tail = term / (4 * k + 1)
        if tail < eps:
            return RatInterval(s, s + tail)


def pi_interval(prec: int = 64) -> RatInterval:
    got = _PI_CACHE.get(prec)
    if got is None:
        got = _atan_inv(5, prec + 6) * 16 - _atan_inv(239, prec + 6) * 4
        _PI_CACHE[prec] = got
    return got


def _cos_point(x: Fraction, prec: int) -> RatInterval:
    """Enclosure of cos(x) for |x| <= 4 (Taylor, factorial tail bound)."""
    term = Fraction(1)
    s = Fraction(0)
    j = 0
    x2 = x * x
    eps = Fraction(1, 1 << (prec + 2))
    while True:
        s += term
        j += 1
        term = -term * x2 / ((2 * j - 1) * (2 * j))
        # once 2j > |x|, terms decay faster than geometrically (ratio <= 1/2)
        tail = 2 * abs(term)
        if 2 * j > abs(x) + 2 and tail < eps:
            lo, hi = s - tail, s + tail
            return RatInterval(max(lo, -1), min(hi, 1))


def cos_interval(x: RatInterval, prec: int = 64) -> RatInterval:
    """Enclosure of cos over an interval contained in [-1/4, pi + 1/4].

    That range covers every use in this package (quadrature nodes in
    [0, pi]); cos is not monotone there only around 0 and pi, which is
    handled by widening to the known extreme values.
    """
    a = _cos_point(x.lo, prec)
    b = _cos_point(x.hi, prec)
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    if x.lo <= 0 <= x.hi:
        hi = Fraction(1)
    pi_lo = pi_interval(prec).lo
    if x.hi >= pi_lo:  # interval may reach pi
        lo = min(lo, Fraction(-1))
    return RatInterval(lo, hi)


def _sin_point(x: Fraction, prec: int) -> RatInterval:
    """Enclosure of sin(x) for |x| <= 4 (Taylor, factorial tail bound)."""
    term = Fraction(x)
    s = Fraction(0)
    j = 0
    x2 = x * x
    eps = Fraction(1, 1 << (prec + 2))
    while True:
        s += term
        j += 1
        term = -term * x2 / ((2 * j) * (2 * j + 1))
        tail = 2 * abs(term)
        if 2 * j > abs(x) + 2 and tail < eps:
            lo, hi = s - tail, s + tail
            return RatInterval(max(lo, -1), min(hi, 1))


def sin_interval(x: RatInterval, prec: int = 64) -> RatInterval:
    """Enclosure of sin over an interval contained in [-1/4, pi + 1/4];
    the only interior extremum there is the maximum at pi/2."""
    a = _sin_point(x.lo, prec)
    b = _sin_point(x.hi, prec)
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    half_pi = pi_interval(prec) * Fraction(1, 2)
    if x.lo <= half_pi.hi and x.hi >= half_pi.lo:
        hi = Fraction(1)
    return RatInterval(lo, hi)


# ---------------------------------------------------------------------------
# polynomial box evaluation

def eval_box(coeffs, w: ComplexBox) -> ComplexBox:
    """Enclosure of h(z) over z in w; `coeffs` ascending, entries rational
    or RatInterval."""
    acc = ComplexBox(RatInterval(0), RatInterval(0))
    for c in reversed(coeffs):
        acc = acc * w
        if isinstance(c, RatInterval):
            acc = ComplexBox(acc.re + c, acc.im)
        else:
            acc = acc + c
    return acc


def eval_interval(coeffs, x: RatInterval) -> RatInterval:
    """Enclosure of h(t) over t in x; entries rational or RatInterval."""
    acc = RatInterval(0)
    for c in reversed(coeffs):
        acc = acc * x
        acc = acc + c
    return acc
