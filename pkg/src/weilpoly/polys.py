"""Dense polynomial arithmetic over Z and Q, Sturm sequences with exact
sign evaluation at rational points and at points r*sqrt(q), and exact
arithmetic in the real quadratic field Q(sqrt(q)).

Polynomials are plain lists of coefficients in ascending degree; the zero
polynomial is [].
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .intervals import RatInterval

# ---------------------------------------------------------------------------
# basic ops (coefficients int or Fraction; ops never mutate inputs)


def normalize(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def deg(p: Sequence) -> int:
    """Degree, -1 for the zero polynomial."""
    return len(normalize(p)) - 1


def add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return normalize(out)


def neg(a):
    return [-c for c in a]


def sub(a, b):
    return add(a, neg(b))


def mul(a, b):
    a, b = normalize(a), normalize(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return normalize(out)


def scale(a, c):
    if c == 0:
        return []
    return [x * c for x in a]


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p):
    return [i * c for i, c in enumerate(p)][1:]


def divmod_exact(a, b):
    """Quotient and remainder over Q (returns Fraction coefficients)."""
    a = [Fraction(c) for c in normalize(a)]
    b = [Fraction(c) for c in normalize(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = a
    while len(r) >= len(b):
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i in range(len(b)):
            r[k + i] -= c * b[i]
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return normalize(q), r


def content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return g


def primitive(p: Sequence[int]) -> list[int]:
    """Divide out the content and force a positive leading coefficient."""
    p = normalize(p)
    if not p:
        return []
    g = content(p)
    if p[-1] < 0:
        g = -g
    return [c // g for c in p]


def primitive_pos(p: Sequence[int]) -> list[int]:
    """Divide out the (positive) content; sign of the polynomial is kept."""
    p = normalize(p)
    if not p:
        return []
    g = content(p)
    return [c // g for c in p]


def to_int_poly(p, keep_sign: bool = False) -> list[int]:
    """Clear denominators and reduce to a primitive integer polynomial.

    With keep_sign the result is a positive-rational multiple of the input
    (as Sturm chains require); otherwise the leading coefficient is made
    positive.
    """
    p = normalize(p)
    if not p:
        return []
    den = 1
    for c in p:
        d = Fraction(c).denominator
        den = den * d // math.gcd(den, d)
    ints = [int(c * den) for c in p]
    return primitive_pos(ints) if keep_sign else primitive(ints)


def gcd_poly(a, b) -> list[int]:
    """gcd over Q, returned as a primitive integer polynomial."""
    a, b = to_int_poly(a), to_int_poly(b)
    while b:
        _, r = divmod_exact(a, b)
        a, b = b, to_int_poly(r)
    return a


def squarefree_part(p) -> list[int]:
    p = to_int_poly(p)
    if deg(p) <= 0:
        return p
    g = gcd_poly(p, derivative(p))
    if deg(g) == 0:
        return p
    q, r = divmod_exact(p, g)
    assert not r
    return to_int_poly(q)


def is_squarefree(p) -> bool:
    return deg(gcd_poly(p, derivative(p))) <= 0


def compose_scale(p, c):
    """p(c*x)."""
    out = []
    pw = 1
    for a in p:
        out.append(a * pw)
        pw *= c
    return normalize(out)


# ---------------------------------------------------------------------------
# exact sign evaluation at a + b*sqrt(q)


def sign_rat(x) -> int:
    return (x > 0) - (x < 0)


def sign_quad(a, b, q: int) -> int:
    """Exact sign of a + b*sqrt(q) (q >= 0, sqrt(q) possibly irrational)."""
    s = math.isqrt(q)
    if s * s == q:
        return sign_rat(a + b * s)
    if a >= 0 and b >= 0:
        return 1 if (a > 0 or b > 0) else 0
    if a <= 0 and b <= 0:
        return -1 if (a < 0 or b < 0) else 0
    # opposite signs: compare a^2 vs q b^2
    d = a * a - q * b * b
    if a > 0:  # b < 0
        return sign_rat(d)
    return -sign_rat(d)


def eval_at_sqrt(p, t, q: int):
    """p(t*sqrt(q)) as a pair (a, b) meaning a + b*sqrt(q).

    Uses (t*sqrt(q))^i = (t^2 q)^(i//2) * (t sqrt(q))^(i mod 2).
    """
    tq = t * t * q
    even_acc = 0
    odd_acc = 0
    pw = 1  # (t^2 q)^(i//2), updated on every odd i
    for i, c in enumerate(p):
        if c:
            if i % 2 == 0:
                even_acc += c * pw
            else:
                odd_acc += c * t * pw
        if i % 2 == 1:
            pw *= tq
    return even_acc, odd_acc


class SqrtBound:
    """Endpoint of the form t*sqrt(q) for Sturm counting."""

    __slots__ = ("t",)

    def __init__(self, t):
        self.t = Fraction(t)

    def __repr__(self):
        return f"SqrtBound({self.t})"


# ---------------------------------------------------------------------------
# Sturm sequences

def sturm_chain(p) -> list[list[int]]:
    """Sturm chain of the squarefree part of p, as primitive integer
    polynomials.  Signs at any point match the classical chain."""
    p = squarefree_part(p)
    if not p:
        raise ValueError("zero polynomial")
    chain = [p]
    dp = primitive_pos(derivative(p))
    if dp:
        chain.append(dp)
        while deg(chain[-1]) > 0:
            _, r = divmod_exact(chain[-2], chain[-1])
            r = to_int_poly(r, keep_sign=True)
            if not r:
                break  # squarefree input: only at the constant end
            chain.append(neg(r))
    return chain


def _variations(signs: list[int]) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x * y < 0)


def _signs_at(chain, x, q: int | None) -> list[int]:
    out = []
    for p in chain:
        if isinstance(x, SqrtBound):
            assert q is not None
            a, b = eval_at_sqrt(p, x.t, q)
            out.append(sign_quad(a, b, q))
        else:
            out.append(sign_rat(evaluate(p, x)))
    return out


def _signs_at_inf(chain, positive: bool) -> list[int]:
    out = []
    for p in chain:
        p = normalize(p)
        if not p:
            out.append(0)
            continue
        s = sign_rat(p[-1])
        if not positive and (len(p) - 1) % 2 == 1:
            s = -s
        out.append(s)
    return out


def _v_plus(chain, x, q) -> int:
    """Sign variations just to the right of x == number of distinct roots
    of chain[0] in (x, +inf)."""
    if x is None:
        return _variations(_signs_at_inf(chain, positive=False))
    signs = _signs_at(chain, x, q)
    if signs[0] == 0 and len(chain) > 1:
        signs[0] = signs[1]  # sign of p just right of a simple root
    return _variations(signs)


def sturm_count(p, a, b, q: int | None = None) -> int:
    """Number of distinct real roots of p in (a, b].

    `a`, `b` are rationals or SqrtBound(t) meaning t*sqrt(q); a < b is
    required and checked when both are rational.  None stands for -inf/+inf
    (a=None: count in (-inf, b]).
    """
    p = normalize(p)
    if not p:
        raise ValueError("zero polynomial")
    if deg(p) == 0:
        return 0
    if (a is not None and b is not None
            and not isinstance(a, SqrtBound) and not isinstance(b, SqrtBound)
            and not Fraction(a) < Fraction(b)):
        raise ValueError("need a < b")
    chain = sturm_chain(p)
    # V_plus(x) = number of distinct roots in (x, +inf), so the difference
    # counts (a, b] with a root at b included and a root at a excluded.
    va = _v_plus(chain, a, q) if a is not None else _variations(
        _signs_at_inf(chain, positive=False))
    vb = _v_plus(chain, b, q) if b is not None else _variations(
        _signs_at_inf(chain, positive=True))
    return va - vb


def count_real_roots(p) -> int:
    """Distinct real roots on all of R."""
    return sturm_count(p, None, None)


# ---------------------------------------------------------------------------
# Q(sqrt(q)): exact arithmetic for the Chebyshev pipeline

class QuadField:
    """The field Q(sqrt(q)); elements are pairs (a, b) = a + b*sqrt(q).

    When q is a perfect square the pair collapses to the rational
    a + b*isqrt(q); all operations remain valid.
    """

    def __init__(self, q: int):
        if q < 2:
            raise ValueError("q must be >= 2")
        self.q = q
        s = math.isqrt(q)
        self.root = s if s * s == q else None

    # elements are tuples (Fraction, Fraction)
    def of(self, a, b=0):
        return (Fraction(a), Fraction(b))

    @property
    def zero(self):
        return (Fraction(0), Fraction(0))

    @property
    def one(self):
        return (Fraction(1), Fraction(0))

    @property
    def sqrt_q(self):
        return (Fraction(0), Fraction(1))

    def add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def neg(self, x):
        return (-x[0], -x[1])

    def mul(self, x, y):
        return (x[0] * y[0] + self.q * x[1] * y[1],
                x[0] * y[1] + x[1] * y[0])

    def mul_rat(self, x, c):
        return (x[0] * c, x[1] * c)

    def inv(self, x):
        if self.root is not None:
            v = x[0] + x[1] * self.root
            if v == 0:
                raise ZeroDivisionError
            inv = 1 / v
            return (inv, Fraction(0))
        n = x[0] * x[0] - self.q * x[1] * x[1]
        if n == 0:
            raise ZeroDivisionError
        return (x[0] / n, -x[1] / n)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def sign(self, x) -> int:
        if self.root is not None:
            return sign_rat(x[0] + x[1] * self.root)
        return sign_quad(x[0], x[1], self.q)

    def is_zero(self, x) -> bool:
        return self.sign(x) == 0

    def conj(self, x):
        return (x[0], -x[1])

    def to_interval(self, x, prec: int = 64) -> RatInterval:
        from .intervals import sqrt_interval
        if self.root is not None:
            return RatInterval(x[0] + x[1] * self.root)
        return RatInterval(x[0]) + sqrt_interval(self.q, prec) * x[1]

    def pow(self, x, k: int):
        out = self.one
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    # -- polynomials over the field (lists of pairs, ascending) ----------

    def pnormalize(self, p):
        p = list(p)
        while p and self.is_zero(p[-1]):
            p.pop()
        return p

    def padd(self, a, b):
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = self.add(out[i], c)
        return self.pnormalize(out)

    def pneg(self, a):
        return [self.neg(c) for c in a]

    def pmul(self, a, b):
        a, b = self.pnormalize(a), self.pnormalize(b)
        if not a or not b:
            return []
        out = [self.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not self.is_zero(ai):
                for j, bj in enumerate(b):
                    out[i + j] = self.add(out[i + j], self.mul(ai, bj))
        return self.pnormalize(out)

    def pscale(self, a, c):
        return self.pnormalize([self.mul(x, c) for x in a])

    def peval(self, p, x):
        acc = self.zero
        for c in reversed(p):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def pderiv(self, p):
        return [self.mul_rat(c, i) for i, c in enumerate(p)][1:]

    def pdivmod(self, a, b):
        a = self.pnormalize(a)
        b = self.pnormalize(b)
        if not b:
            raise ZeroDivisionError
        q = [self.zero] * max(0, len(a) - len(b) + 1)
        r = list(a)
        binv = self.inv(b[-1])
        while len(r) >= len(b):
            c = self.mul(r[-1], binv)
            k = len(r) - len(b)
            q[k] = c
            for i in range(len(b)):
                r[k + i] = self.sub(r[k + i], self.mul(c, b[i]))
            r.pop()
            while r and self.is_zero(r[-1]):
                r.pop()
        return self.pnormalize(q), self.pnormalize(r)

    def _reduce_size(self, p):
        """Divide by a positive rational to keep integer parts small."""
        num = 0
        den = 1
        for (a, b) in p:
            num = math.gcd(num, math.gcd(a.numerator, b.numerator))
            den = den * a.denominator // math.gcd(den, a.denominator)
            den = den * b.denominator // math.gcd(den, b.denominator)
        if num == 0:
            return p
        c = Fraction(den, num)
        return [self.mul_rat(x, c) for x in p]

    def count_real_roots(self, p) -> int:
        """Distinct real roots of p (coefficients in Q(sqrt q)) on R."""
        p = self.pnormalize(p)
        if not p:
            raise ValueError("zero polynomial")
        if len(p) == 1:
            return 0
        # squarefree part
        g = self._pgcd(p, self.pderiv(p))
        if len(g) > 1:
            p, r = self.pdivmod(p, g)
            assert not r
        chain = [self._reduce_size(p)]
        d = self.pderiv(p)
        if d:
            chain.append(self._reduce_size(d))
            while len(chain[-1]) > 1:
                _, r = self.pdivmod(chain[-2], chain[-1])
                if not r:
                    break
                chain.append(self._reduce_size(self.pneg(r)))
        def s_inf(positive):
            out = []
            for c in chain:
                s = self.sign(c[-1])
                if not positive and (len(c) - 1) % 2 == 1:
                    s = -s
                out.append(s)
            return out
        return _variations(s_inf(False)) - _variations(s_inf(True))

    def _pgcd(self, a, b):
        a, b = self.pnormalize(a), self.pnormalize(b)
        while b:
            a = self._reduce_size(a)
            b = self._reduce_size(b)
            _, r = self.pdivmod(a, b)
            a, b = b, r
        return a
