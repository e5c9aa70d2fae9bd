"""Truncated power series with certified tails.

The central object is exp() of an exponent series that is a polynomial
plus an optional geometric tail g * (z^k0 + z^(k0+1) + ...); the Taylor
coefficients through degree n are computed exactly over Q and the omitted
tail is bounded by comparison with a computable majorant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .intervals import RatInterval, exp_interval


@dataclass(frozen=True)
class ExpExponent:
    """Exponent series: sum(poly[i] * z^(i+1)) + geom * sum_{k>=geom_start} z^k.

    `poly` lists the coefficients of z^1, z^2, ... (no constant term).
    """
    poly: tuple[Fraction, ...]
    geom: Fraction = Fraction(0)
    geom_start: int = 2

    def coefficient(self, k: int) -> Fraction:
        if k <= 0:
            return Fraction(0)
        c = self.poly[k - 1] if k - 1 < len(self.poly) else Fraction(0)
        if self.geom and k >= self.geom_start:
            c += self.geom
        return c

    def is_zero(self) -> bool:
        return not self.geom and all(c == 0 for c in self.poly)

    def abs_value_at(self, x: Fraction) -> Fraction:
        """sum |e_k| x^k for 0 <= x < 1 (majorant exponent value)."""
        if not 0 <= x < 1:
            raise ValueError("need 0 <= x < 1")
        v = Fraction(0)
        for i, c in enumerate(self.poly):
            v += abs(c) * x ** (i + 1)
        if self.geom:
            v += abs(self.geom) * x ** self.geom_start / (1 - x)
        return v


@dataclass(frozen=True)
class TruncSeries:
    """Exact coefficients 0..n of a power series plus a certified bound on
    the tail sum_{i>n} c_i x^i for points x with enclosure inside [0, 1)."""

    coeffs: tuple[Fraction, ...]
    exponent: ExpExponent  # provenance, used by the tail majorant

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval_head(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def majorant_value(self, x: Fraction, prec: int = 64) -> RatInterval:
        """Upper enclosure of exp(sum |e_k| x^k) at rational x in [0, 1)."""
        return exp_interval(self.exponent.abs_value_at(x), prec)

    def tail_bound(self, x: "RatInterval | Fraction", prec: int = 64) -> Fraction:
        """Certified upper bound for sum_{i>n} c_i x^i, requiring the
        enclosure of x to lie inside [0, 1).

        Bound: for x0 in (x_hi, 1), tail(x) <= (x_hi/x0)^(n+1) * M(x0)
        where M majorizes the full series (termwise |c_i| <= M^[i]).
        """
        if isinstance(x, RatInterval):
            xh = x.hi
            if x.lo < 0:
                raise ValueError("tail bound needs x >= 0")
        else:
            xh = Fraction(x)
            if xh < 0:
                raise ValueError("tail bound needs x >= 0")
        if xh >= 1:
            raise ValueError("evaluation point enclosure not inside [0,1)")
        if self.exponent.is_zero():
            return Fraction(0)
        x0 = (xh + 1) / 2
        m = self.majorant_value(x0, prec).hi
        return (xh / x0) ** (self.degree + 1) * m


def series_exp(exponent: ExpExponent, n: int) -> TruncSeries:
    """Exact Taylor coefficients of exp(exponent) through degree n.

    Standard recurrence: F_0 = 1, i*F_i = sum_{k=1..i} k*e_k*F_{i-k}.
    """
    e = [exponent.coefficient(k) for k in range(n + 1)]
    f = [Fraction(1)] + [Fraction(0)] * n
    for i in range(1, n + 1):
        acc = Fraction(0)
        for k in range(1, i + 1):
            if e[k]:
                acc += k * e[k] * f[i - k]
        f[i] = acc / i
    return TruncSeries(tuple(f), exponent)


def j_series(q: int, s: int, n: int) -> TruncSeries:
    """Taylor data of J(z) = exp(s z + (q+1)/2 * z^2/(1-z)) through degree n."""
    return series_exp(ExpExponent(poly=(Fraction(s),),
                                  geom=Fraction(q + 1, 2), geom_start=2), n)
