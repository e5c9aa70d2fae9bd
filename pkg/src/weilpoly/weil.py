"""Honda-Tate verification core: the hat transform, q-symmetry, companion
polynomials, the certified roots-on-circle test, ordinarity and Newton
polygons, and the interval formulas that bound realizable orders.

All verdicts here are exact; the only irrational quantities (the interval
endpoints involving sqrt(q)) are returned as rational enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import polys
from .intervals import RatInterval, sqrt_interval
from .polys import SqrtBound, sturm_count

# Honda-Tate condition (d') verdicts
VERIFIED_ORDINARY = "VerifiedOrdinary"
VERIFIED_PRIME_Q = "VerifiedPrimeQ"
VERIFIED_NEWTON = "VerifiedNewton"
UNKNOWN = "Unknown"
FAILED = "Failed"


def prime_power(q: int) -> tuple[int, int]:
    """(p, e) with q = p^e; raises for non prime powers."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    return q, 1


@dataclass(frozen=True)
class WeilCandidate:
    """Monic q-symmetric integer polynomial of degree 2n plus provenance."""
    q: int
    n: int
    f: tuple[int, ...]  # ascending, length 2n+1
    provenance: str = ""

    def __post_init__(self):
        p, e = prime_power(self.q)
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_e", e)
        if len(self.f) != 2 * self.n + 1 or self.f[-1] != 1:
            raise ValueError("f must be monic of degree 2n")

    @property
    def p(self) -> int:
        return self._p

    @property
    def e(self) -> int:
        return self._e

    def order(self) -> int:
        return sum(self.f)


@dataclass(frozen=True)
class GCompanion:
    """G with x^n G(x + q/x) equal to the source polynomial."""
    q: int
    n: int
    g: tuple[int, ...]  # ascending, length n+1, monic


@dataclass(frozen=True)
class Certificate:
    q_symmetric: bool
    roots_on_circle: bool
    ordinary: bool
    honda_tate: str
    p_rank: int
    order: int
    squarefree: bool

    @property
    def verified(self) -> bool:
        return self.honda_tate in (VERIFIED_ORDINARY, VERIFIED_PRIME_Q,
                                   VERIFIED_NEWTON)


# ---------------------------------------------------------------------------
# hat transform and q-symmetry

def hat(h, n: int, q: int) -> list[Fraction]:
    """x^(2n) h(1/x) + q^n h(x/q), for deg h < 2n.  Rational output."""
    h = polys.normalize(h)
    if len(h) - 1 >= 2 * n:
        raise ValueError("hat needs deg h < 2n")
    out = [Fraction(0)] * (2 * n + 1)
    qn = q ** n
    for i, c in enumerate(h):
        c = Fraction(c)
        out[2 * n - i] += c
        out[i] += c * qn / q ** i
    return out


def hat_int(h, n: int, q: int) -> list[int]:
    """hat() when the result is integral (raises otherwise)."""
    out = hat(h, n, q)
    if any(c.denominator != 1 for c in out):
        raise ValueError("hat is not integral for this h")
    return [int(c) for c in out]


def hat_value_at_1(h, n: int, q: int) -> Fraction:
    """hat(h)(1) = h(1) + q^n h(1/q), without expanding."""
    return Fraction(polys.evaluate(h, 1)) + q ** n * Fraction(
        polys.evaluate(h, Fraction(1, q)))


def is_q_symmetric(f, q: int, n: int) -> bool:
    """Coefficient identity f^[i] = q^(n-i) f^[2n-i] for i < n."""
    f = list(f)
    if len(f) - 1 != 2 * n:
        raise ValueError("degree must be exactly 2n")
    return all(f[i] == q ** (n - i) * f[2 * n - i] for i in range(n))


# ---------------------------------------------------------------------------
# companion polynomial

def companion_basis(q: int, n: int) -> list[list[int]]:
    """Row k = coefficients of x^n (x + q/x)^k = x^(n-k) (x^2 + q)^k,
    ascending, padded to degree n + k."""
    rows = []
    for k in range(n + 1):
        row = [0] * (n + k + 1)
        for j in range(k + 1):
            row[n + k - 2 * j] = math.comb(k, j) * q ** j
        rows.append(row)
    return rows


def expand_companion(g, q: int, n: int) -> list[int]:
    """f(x) = x^n G(x + q/x) for G of degree n (ascending input)."""
    g = list(g)
    if len(g) - 1 != n:
        raise ValueError("G must have degree n")
    basis = companion_basis(q, n)
    out = [0] * (2 * n + 1)
    for k, c in enumerate(g):
        if c:
            row = basis[k]
            for i, b in enumerate(row):
                if b:
                    out[i] += c * b
    return out


def to_companion(cand: "WeilCandidate | tuple", q: int | None = None,
                 n: int | None = None) -> GCompanion:
    """Invert f = x^n G(x + q/x) by peeling leading coefficients.

    Rejects inputs that are not q-symmetric (the residual does not vanish).
    """
    if isinstance(cand, WeilCandidate):
        f, q, n = list(cand.f), cand.q, cand.n
    else:
        f = list(cand)
        assert q is not None and n is not None
    if len(f) - 1 != 2 * n:
        raise ValueError("degree must be exactly 2n")
    basis = companion_basis(q, n)
    rem = list(f)
    g = [0] * (n + 1)
    for k in range(n, -1, -1):
        c = rem[n + k]
        g[k] = c
        if c:
            row = basis[k]
            for i, b in enumerate(row):
                rem[i] -= c * b
    if any(rem):
        raise ValueError("not q-symmetric: companion residual nonzero")
    return GCompanion(q=q, n=n, g=tuple(g))


# ---------------------------------------------------------------------------
# certified roots-on-circle

def companion_roots_in_interval(g, q: int) -> bool:
    """True iff every complex root of G lies in [-2 sqrt(q), 2 sqrt(q)]
    (in particular all roots are real).  Exact."""
    g = polys.normalize(g)
    if len(g) <= 1:
        return True
    gsf = polys.squarefree_part(g)
    d = polys.deg(gsf)
    s = math.isqrt(4 * q)
    if s * s == 4 * q:
        # rational endpoints +-s: peel roots at the endpoints
        for r in (s, -s):
            while polys.evaluate(gsf, r) == 0:
                gsf, rem = polys.divmod_exact(gsf, [-r, 1])
                assert not rem
                gsf = polys.to_int_poly(gsf)
        d = polys.deg(gsf)
        if d == 0:
            return True
        return sturm_count(gsf, Fraction(-s), Fraction(s)) == d
    # q non-square: the only way +-2 sqrt(q) is a root is via x^2 - 4q
    x2m4q = [-4 * q, 0, 1]
    quo, rem = polys.divmod_exact(gsf, x2m4q)
    if not rem:
        gsf = polys.to_int_poly(quo)
        d = polys.deg(gsf)
    if d <= 0:
        return True
    return sturm_count(gsf, SqrtBound(-2), SqrtBound(2), q=q) == d


def roots_on_circle(cand: WeilCandidate) -> bool:
    """Certified: all complex roots of f on |x| = sqrt(q).

    Via the companion transform: equivalent to all roots of G real and in
    the closed interval [-2 sqrt(q), 2 sqrt(q)].
    """
    try:
        comp = to_companion(cand)
    except ValueError:
        return False
    return companion_roots_in_interval(list(comp.g), cand.q)


# ---------------------------------------------------------------------------
# Newton polygon / p-rank

def newton_slopes(f, p: int, e: int) -> list[Fraction]:
    """Multiset of valuations of the roots of monic f, normalized so that
    v(q) = 1; computed from the Newton polygon of f at p."""
    f = polys.normalize(f)
    d = len(f) - 1
    pts = []
    for i, c in enumerate(f):
        if c:
            v = 0
            cc = abs(c)
            while cc % p == 0:
                cc //= p
                v += 1
            pts.append((i, v))
    # lower convex hull, left to right
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it is above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes: list[Fraction] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, x2 - x1)  # root valuation on this segment
        slopes.extend([Fraction(s, e)] * (x2 - x1))
    assert len(slopes) == d
    return sorted(slopes)


def p_rank_of(f, p: int, e: int) -> int:
    return sum(1 for s in newton_slopes(f, p, e) if s == 0)


# ---------------------------------------------------------------------------
# the full certificate

def certify(cand: WeilCandidate, require_ordinary: bool = False) -> Certificate:
    """Evaluate Honda-Tate conditions (a)-(d) and, failing (d), the
    decidable sufficient cases of condition (d').

    The (d') verdict is a tri-state: Verified*/Unknown/Failed.  Full Q_p
    factorization is out of scope, so fractional-slope segments on
    non-prime q yield Unknown.
    """
    q, n, p, e = cand.q, cand.n, cand.p, cand.e
    f = list(cand.f)
    order = cand.order()
    sym = is_q_symmetric(f, q, n)
    circle = sym and roots_on_circle(cand)
    sqfree = polys.is_squarefree(f)
    if not (sym and circle):
        return Certificate(q_symmetric=sym, roots_on_circle=circle,
                           ordinary=False, honda_tate=FAILED, p_rank=0,
                           order=order, squarefree=sqfree)
    slopes = newton_slopes(f, p, e)
    p_rank = sum(1 for s in slopes if s == 0)
    ordinary = f[n] % p != 0
    if ordinary:
        verdict = VERIFIED_ORDINARY
    elif require_ordinary:
        verdict = FAILED
    elif e == 1:
        verdict = VERIFIED_PRIME_Q
    elif all(s == 0 or s == 1 for s in slopes):
        # integer slopes: every Q_p-irreducible factor is slope pure with
        # integral v(g(0))/v(q), so (d') holds whatever the factorization
        verdict = VERIFIED_NEWTON
    else:
        verdict = UNKNOWN
    return Certificate(q_symmetric=True, roots_on_circle=True,
                       ordinary=ordinary, honda_tate=verdict, p_rank=p_rank,
                       order=order, squarefree=sqfree)


# ---------------------------------------------------------------------------
# interval formulas

@dataclass(frozen=True)
class IntervalReport:
    """Rational enclosures of the order-bounding intervals for (q, n)."""
    q: int
    n: int
    hasse_weil: tuple[RatInterval, RatInterval]
    attained: tuple[RatInterval, RatInterval]
    simplified: tuple[RatInterval, RatInterval]
    inner: tuple[Fraction, Fraction]
    outer: tuple[int, int]


def tau_interval(x: RatInterval, prec: int = 96) -> RatInterval:
    """tau(x) = x + sqrt(x^2 - 1), increasing for x >= 1."""
    if x.lo < 1:
        raise ValueError("tau needs x >= 1")
    lo = x.lo + sqrt_interval(x.lo * x.lo - 1, prec).lo
    hi = x.hi + sqrt_interval(x.hi * x.hi - 1, prec).hi
    return RatInterval(lo, hi)


def interval_report(q: int, n: int, prec: int = 96) -> IntervalReport:
    rq = sqrt_interval(q, prec)
    hw_lo = (RatInterval(q + 1) - 2 * rq).pow_int(n)
    hw_hi = (RatInterval(q + 1) + 2 * rq).pow_int(n)
    att_lo = tau_interval(RatInterval(Fraction(q, 2) + Fraction(3, 2)) - rq, prec)
    att_hi = tau_interval(RatInterval(Fraction(q, 2) - Fraction(1, 2)) + rq, prec)
    simp_lo = (RatInterval(q + 3 - Fraction(1, q)) - 2 * rq).pow_int(n)
    simp_hi = (RatInterval(q - 1 - Fraction(1, q)) + 2 * rq).pow_int(n)
    fl = math.isqrt(4 * q)  # floor(2 sqrt q)
    ce = fl if fl * fl == 4 * q else fl + 1
    inner = (Fraction(q - fl + 3), Fraction(q + fl - 1) - Fraction(1, q))
    outer = (q - ce + 2, q + ce)
    return IntervalReport(q=q, n=n, hasse_weil=(hw_lo, hw_hi),
                          attained=(att_lo, att_hi),
                          simplified=(simp_lo, simp_hi),
                          inner=inner, outer=outer)
