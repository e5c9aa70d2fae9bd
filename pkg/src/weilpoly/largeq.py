"""Fixed dimension, large q: the exact B_min/B_max/B_diff profile of
normalized companion coefficient pairs, the gap predictor for unrealizable
integers near the Hasse-Weil edge, the constructive realization of any m
in the central range, and the Eisenstein obstruction for n = 2 over
non-prime q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import polys
from .exponential import ConstructionError
from .intervals import RatInterval, sqrt_interval
from .weil import (Certificate, WeilCandidate, certify, expand_companion,
                   prime_power)


@dataclass(frozen=True)
class BProfile:
    """Exact evaluators for the min/max of the x^(n-2) coefficient of a
    monic degree-n real polynomial with all roots in [-2, 2], as a function
    of a = x^(n-1) coefficient in [-2n, 2n]."""

    n: int

    def b_max(self, a) -> Fraction:
        a = Fraction(a)
        return Fraction(math.comb(self.n, 2)) * (a / self.n) ** 2

    def b_min(self, a) -> Fraction:
        a = Fraction(a)
        n = self.n
        if not -2 * n <= a <= 2 * n:
            raise ValueError("a outside [-2n, 2n]")
        k = min(n - 1, max(0, int(math.floor((a + 2 * n) / 4))))
        # clamp to the segment containing a
        while k > 0 and a < 4 * k - 2 * n:
            k -= 1
        while k < n - 1 and a > 4 * k - 2 * n + 4:
            k += 1
        return (4 * k - 2 * n + 2) * a - 8 * k * k + 8 * k * (n - 1) \
            - 2 * (n - 1) * n

    def b_diff(self, a) -> Fraction:
        return self.b_max(a) - self.b_min(a)

    # lambda_1 = 2n - sqrt(2n/(n-1)), lambda_2 = 2n - sqrt(4n/(n-1))
    def lambda1_sq_gap(self) -> Fraction:
        """(2n - lambda_1)^2, exact."""
        return Fraction(2 * self.n, self.n - 1)

    def lambda2_sq_gap(self) -> Fraction:
        return Fraction(4 * self.n, self.n - 1)

    def lambda1_interval(self, prec: int = 64) -> RatInterval:
        return RatInterval(2 * self.n) - sqrt_interval(self.lambda1_sq_gap(), prec)

    def lambda2_interval(self, prec: int = 64) -> RatInterval:
        return RatInterval(2 * self.n) - sqrt_interval(self.lambda2_sq_gap(), prec)

    def abs_lambda_above_lambda1(self, lam: Fraction) -> bool:
        """Exact |lam| > lambda_1 (and |lam| <= 2n required separately)."""
        gap = 2 * self.n - abs(Fraction(lam))
        return gap >= 0 and gap * gap < self.lambda1_sq_gap()

    def abs_lambda_below_lambda1(self, lam: Fraction) -> bool:
        gap = 2 * self.n - abs(Fraction(lam))
        return gap > 0 and gap * gap > self.lambda1_sq_gap()


def b_profile(n: int) -> BProfile:
    if n < 2:
        raise ValueError("need n >= 2")
    return BProfile(n=n)


# ---------------------------------------------------------------------------
# gap intervals (unrealizable stretches near the edge)

def floor_mul_sqrt(t: Fraction, q: int) -> int:
    """floor(t * sqrt(q)) exactly, for t >= 0."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("t >= 0 required")
    r = math.isqrt((t.numerator * t.numerator * q) // (t.denominator * t.denominator))
    # adjust: want largest r with r^2 den^2 <= num^2 q
    while (r + 1) ** 2 * t.denominator ** 2 <= t.numerator ** 2 * q:
        r += 1
    while r ** 2 * t.denominator ** 2 > t.numerator ** 2 * q:
        r -= 1
    return r


@dataclass(frozen=True)
class GapInterval:
    q: int
    n: int
    lam: Fraction
    eps: Fraction
    r: int
    lo: Fraction
    hi: Fraction

    def integers(self) -> range:
        return range(math.ceil(self.lo), math.floor(self.hi) + 1)


def gap_interval(q: int, n: int, lam, eps) -> GapInterval:
    """The interval [(q+1)^n + r(q+1)^(n-1) + (B_max(lam)+eps) q^(n-1),
    (q+1)^n + (r+1)(q+1)^(n-1) + (B_min(lam)-eps) q^(n-1)] with
    r = floor(lam sqrt(q)); contains no abelian-variety order once q is
    large enough for the derivation's continuity step."""
    lam = Fraction(lam)
    eps = Fraction(eps)
    prof = b_profile(n)
    if not prof.abs_lambda_above_lambda1(lam) or abs(lam) >= 2 * n:
        raise ValueError("need lambda_1 < |lambda| < 2n")
    if eps <= 0 or not prof.b_diff(lam) < 1 - 2 * eps:
        raise ValueError("need eps > 0 with B_diff(lambda) < 1 - 2 eps")
    if lam >= 0:
        r = floor_mul_sqrt(lam, q)
    else:
        t = -lam
        k = floor_mul_sqrt(t, q)
        exact = k * k * t.denominator ** 2 == t.numerator ** 2 * q
        r = -k if exact else -k - 1
    lo = Fraction((q + 1) ** n) + r * (q + 1) ** (n - 1) \
        + (prof.b_max(lam) + eps) * q ** (n - 1)
    hi = Fraction((q + 1) ** n) + (r + 1) * (q + 1) ** (n - 1) \
        + (prof.b_min(lam) - eps) * q ** (n - 1)
    return GapInterval(q=q, n=n, lam=lam, eps=eps, r=r, lo=lo, hi=hi)


# ---------------------------------------------------------------------------
# constructive realization in the central range

def _homotopy_roots(a_iv: RatInterval, n: int, sigma: Fraction
                    ) -> list[RatInterval]:
    """Roots along the two-leg homotopy: extreme config (all but one root
    at +-2) -> arithmetic progression -> equal roots, at parameter
    sigma in [0, 2]; a_iv encloses a (the negated root sum)."""
    neg_an = -a_iv * Fraction(1, n)  # common target -a/n
    # extreme config for B_min: roots sorted increasing, all +-2 except one
    # determined by the segment; as a increases roots move from 2 to -2
    lo_cfg: list[RatInterval] = []
    a_mid = a_iv.mid
    k = min(n - 1, max(0, int(math.floor((a_mid + 2 * n) / 4))))
    # roots: k of them at -2, one moving, n-k-1 at +2
    moving = -(a_iv + (k * -2 + (n - k - 1) * 2))
    lo_cfg = [RatInterval(-2)] * k + [moving] + [RatInterval(2)] * (n - k - 1)
    lo_cfg.sort(key=lambda iv: iv.mid)
    # arithmetic progression centered at -a/n with spread eps0/2
    two = Fraction(2)
    eps0 = RatInterval(two) - RatInterval(max(neg_an.mid, -neg_an.mid))
    if eps0.lo < 0:
        eps0 = RatInterval(0, max(eps0.hi, 0))
    mid_cfg = []
    for i in range(n):
        frac = Fraction(i, n - 1) if n > 1 else Fraction(0)
        off = (frac - Fraction(1, 2)) * eps0
        mid_cfg.append(neg_an + off)
    hi_cfg = [neg_an] * n
    out = []
    if sigma <= 1:
        s = Fraction(sigma)
        for u, v in zip(lo_cfg, mid_cfg):
            out.append(u * (1 - s) + v * s)
    else:
        s = Fraction(sigma) - 1
        for u, v in zip(mid_cfg, hi_cfg):
            out.append(u * (1 - s) + v * s)
    return out


def _e2_of_roots(roots: list[RatInterval]) -> RatInterval:
    """Second elementary symmetric function, enclosure."""
    total = RatInterval(0)
    acc = RatInterval(0)
    for r in roots:
        total = total + r
    # e2 = (e1^2 - p2)/2
    p2 = RatInterval(0)
    for r in roots:
        p2 = p2 + r.square()
    return (total.square() - p2) * Fraction(1, 2)


def construct_large_q(q: int, n: int, m: int, lam=Fraction(19, 10),
                      eps=None, prec: int = 96
                      ) -> tuple[WeilCandidate, Certificate]:
    """Place roots via the homotopy to hit (a, b), round companion
    coefficients top-down keeping exact value windows at q+1, apply the
    ordinarity step (omitted when n = 2, prime q), and certify.

    Fails with a structured error when q is too small for the rounding to
    keep the roots inside [-2 sqrt(q), 2 sqrt(q)].
    """
    p, e = prime_power(q)
    lam = Fraction(lam)
    if n < 2 or (n == 2 and e != 1):
        raise ValueError("need n >= 3, or n = 2 with prime q")
    prof = b_profile(n)
    if not prof.abs_lambda_below_lambda1(lam):
        raise ValueError("need lambda < lambda_1")
    if (m - q ** n) ** 2 > lam * lam * q ** (2 * n - 1):
        raise ValueError("m outside [q^n - lam q^(n-1/2), q^n + lam q^(n-1/2)]")

    rq = sqrt_interval(q, prec)
    inv_qn_half = sqrt_interval(Fraction(1, q ** (2 * n - 1)), prec)
    a_iv = (m - q ** n) * inv_qn_half  # a = (m - q^n) / q^(n-1/2)

    # epsilon default: quarter of the worst-case slack of B_diff - 1
    bdiff_lo = min(prof.b_diff(lam), prof.b_diff(-lam))
    if eps is None:
        eps = min(Fraction(1, 100), (bdiff_lo - 1) / 4)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("B_diff(lambda) <= 1: no eps margin")

    # integer c_1 and exact rational b with m = (q+1)^n + (c_1+b)(q+1)^(n-1)
    T = Fraction(m - (q + 1) ** n, (q + 1) ** (n - 1))
    bmin_up = max(prof.b_min(a_iv.lo), prof.b_min(a_iv.hi))
    bmax_dn = min(prof.b_max(a_iv.lo), prof.b_max(a_iv.hi))
    c1 = math.ceil(T - (bmax_dn - eps))
    b = T - c1
    if not (bmin_up + eps <= b <= bmax_dn - eps):
        raise ConstructionError(
            "window", "no integer c_1 lands b inside the shrunken profile")

    # bisection on the homotopy parameter for e2(roots) = b
    lo_s, hi_s = Fraction(0), Fraction(2)
    f_lo = _e2_of_roots(_homotopy_roots(a_iv, n, lo_s)) - b
    f_hi = _e2_of_roots(_homotopy_roots(a_iv, n, hi_s)) - b
    if not (f_lo.hi < 0 or f_lo.lo > 0):
        lo_s = Fraction(1, 1000)
        f_lo = _e2_of_roots(_homotopy_roots(a_iv, n, lo_s)) - b
    sign_lo = -1 if f_lo.hi < 0 else 1
    for _ in range(prec):
        mid = (lo_s + hi_s) / 2
        val = _e2_of_roots(_homotopy_roots(a_iv, n, mid)) - b
        if val.hi < 0:
            s_sign = -1
        elif val.lo > 0:
            s_sign = 1
        else:
            break  # enclosure straddles: mid is (numerically) the root
        if s_sign == sign_lo:
            lo_s = mid
        else:
            hi_s = mid
    sigma = (lo_s + hi_s) / 2
    roots = _homotopy_roots(a_iv, n, sigma)

    # elementary symmetric functions of the roots, as enclosures; then
    # G = q^(n/2) g(x / sqrt q) has G^[n-i] = (-1)^i e_i * q^(i/2)
    evs = [RatInterval(1)]
    for r in roots:
        new = [RatInterval(1)] + [RatInterval(0)] * len(evs)
        for i in range(1, len(evs) + 1):
            prev_i = evs[i] if i < len(evs) else RatInterval(0)
            new[i] = prev_i + evs[i - 1] * r
        evs = new
    G_real: list[RatInterval] = [RatInterval(0)] * (n + 1)
    G_real[n] = RatInterval(1)
    for i in range(1, n + 1):
        sign = -1 if i % 2 else 1
        pw = rq.pow_int(i)
        G_real[n - i] = evs[i] * pw * sign

    # round top-down: c_i the integer making G_i(q+1) - m land in
    # [0, (q+1)^(n-i))
    coeffs: list[int | None] = [None] * (n + 1)
    coeffs[n] = 1
    coeffs[n - 1] = c1
    for i in range(2, n + 1):
        w = (q + 1) ** (n - i)
        fixed = Fraction((q + 1) ** n) + sum(
            coeffs[n - j] * (q + 1) ** (n - j) for j in range(1, i))
        tail = RatInterval(0)
        for j in range(i + 1, n + 1):
            tail = tail + G_real[n - j] * ((q + 1) ** (n - j))
        # need c_i = ceil((m - fixed - tail - (w - 1)) / w) .. unique window
        lo_c = (m - fixed - tail.hi - (w - 1)) / w
        hi_c = (m - fixed - tail.lo) / w
        clo = math.ceil(lo_c)
        chi = math.floor(hi_c)
        if clo != chi:
            # enclosure too wide or genuinely ambiguous: tighten by retry
            raise ConstructionError(
                "round", f"coefficient window ambiguous at i={i} "
                f"(width {float(hi_c - lo_c):.3g})")
        coeffs[n - i] = clo
    G = [int(c) for c in coeffs]  # ascending
    val = sum(G[k] * (q + 1) ** k for k in range(n + 1))
    if val != m:
        # final window [0,1) forces equality; only rounding ambiguity fails
        raise ConstructionError("round", "G(q+1) != m after rounding")

    # ordinarity step: G += s (x - (q+1)), s in {0,1}, skipped when n=2
    if n >= 3 and G[0] % p == 0:
        G[1] += 1
        G[0] -= q + 1
    if n >= 3 and G[0] % p == 0:
        raise ConstructionError("ordinary", "constant term stuck at 0 mod p")

    from .weil import companion_roots_in_interval
    if not companion_roots_in_interval(G, q):
        raise ConstructionError(
            "roots", "rounding pushed a root outside [-2 sqrt q, 2 sqrt q] "
            "(q too small for this n)")
    f = expand_companion(G, q, n)
    cand = WeilCandidate(q=q, n=n, f=tuple(f), provenance="largeq")
    cert = certify(cand, require_ordinary=(n >= 3))
    if not cert.verified or cert.order != m:
        raise ConstructionError("certify", f"certification failed: {cert}")
    return cand, cert


# ---------------------------------------------------------------------------
# the n = 2 Eisenstein obstruction over non-prime q

def eisenstein_obstruction(q: int, m: int) -> bool:
    """True iff the only monic quadratic G with roots in
    [-2 sqrt q, 2 sqrt q] and G(q+1) = m is Eisenstein at p (with q = p^e,
    e >= 2), which certifies that no abelian surface over F_q has order m.
    """
    p, e = prime_power(q)
    if e < 2:
        return False
    rmax = math.isqrt(16 * q)  # |c_1| <= 4 sqrt(q)
    valid: list[tuple[int, int]] = []
    for r in range(-rmax - 1, rmax + 2):
        c = m - (q + 1) ** 2 - r * (q + 1)
        disc = r * r - 4 * c
        if disc < 0 or r * r > 16 * q:
            continue
        gB = polys.sign_quad(4 * q + c, 2 * r, q)    # G(2 sqrt q)
        gmB = polys.sign_quad(4 * q + c, -2 * r, q)  # G(-2 sqrt q)
        if gB >= 0 and gmB >= 0:
            valid.append((r, c))
    if len(valid) != 1:
        return False
    r, c = valid[0]
    return r % p == 0 and c % p == 0 and c % (p * p) != 0
