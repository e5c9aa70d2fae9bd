"""Certified nonvanishing of a polynomial on the closed disk of radius
q^(-1/2) (or any rational-squared radius), and a certified lower bound mu
for |h| on the boundary circle.

Zero exclusion by quadtree subdivision.  A box is discharged by the
centered form |h(center)| - Lip_local * halfdiag > threshold, evaluated
entirely in scaled integer arithmetic; box corners stay dyadic, so every
bound is exact.  Real coefficients let us examine the upper half disk only.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

from .intervals import RatInterval, sqrt_interval
from .polys import normalize

_SQRT2_UP = Fraction(46341, 32768)  # > sqrt(2)
_BASE_BITS = 6
# Local-Lipschitz radius buckets: bucket j covers |z| <= (j/64)*r_out.  The
# largest box in the cover reaches |z| ~ sqrt(2)*radius, so the table must
# extend well past j=64.
_BUCKETS = 160


@dataclass(frozen=True)
class DiskCertificate:
    nonvanishing: bool
    mu: Fraction  # certified lower bound for |h| on the boundary circle
    subdivision_depth: int
    boxes_examined: int
    min_modulus: Fraction  # certified lower bound for |h| on the whole disk


class _Engine:
    """Shared state for one subdivision run."""

    def __init__(self, h, radius_sq: Fraction, threshold: Fraction):
        mid: list[Fraction] = []
        slack = Fraction(0)
        radius_up = sqrt_interval(radius_sq, 48).hi
        r_out = radius_up * Fraction(17, 16)
        pw = Fraction(1)
        for c in h:
            if isinstance(c, RatInterval):
                mid.append(c.mid)
                slack += (c.width / 2) * pw
            else:
                mid.append(Fraction(c))
            pw *= r_out
        self.slack = slack
        self.threshold = threshold
        self.radius_sq = radius_sq
        den = 1
        for c in mid:
            den = den * c.denominator // math.gcd(den, c.denominator)
        self.den = den
        self.ints = [int(c * den) for c in mid]
        self.deg = len(self.ints) - 1
        # local Lipschitz bounds at bucketed radii r_j = j/64 * r_out
        self.lip = []
        for j in range(_BUCKETS + 1):
            r = r_out * Fraction(max(j, 1), 64)
            s = Fraction(0)
            pw = Fraction(1)
            for k in range(1, len(mid)):
                s += k * (abs(mid[k]) + slack) * pw
                pw *= r
            self.lip.append(s if s > 0 else Fraction(1))
        # base cover geometry
        base = 1 << _BASE_BITS
        self.bsn = math.ceil(radius_up * base)  # box-side numerator at depth 0
        self._margin_cache: dict[tuple[int, int], int] = {}
        self._scale_cache: dict[int, int] = {}

    # -- exact per-box tests ---------------------------------------------

    def _corner_minmax2(self, ix: int, iy: int, depth: int) -> tuple[int, int, int]:
        """(m2, M2, fours) integer numerators of min/max |z|^2 at scale
        4^(BASE+depth) (divided by fours), corners (ix,iy)*bsn/2^scale."""
        bsn = self.bsn
        jx0, jx1 = ix * bsn, (ix + 1) * bsn
        jy0, jy1 = iy * bsn, (iy + 1) * bsn
        mx = 0 if jx0 <= 0 <= jx1 else min(abs(jx0), abs(jx1))
        my = 0 if jy0 <= 0 <= jy1 else min(abs(jy0), abs(jy1))
        Mx = max(abs(jx0), abs(jx1))
        My = max(abs(jy0), abs(jy1))
        fours = 1 << (2 * (_BASE_BITS + depth))
        return mx * mx + my * my, Mx * Mx + My * My, fours

    def outside(self, m2: int, fours: int) -> bool:
        rs = self.radius_sq
        return m2 * rs.denominator > rs.numerator * fours

    def touches_boundary(self, m2: int, M2: int, fours: int) -> bool:
        rs = self.radius_sq
        return (m2 * rs.denominator <= rs.numerator * fours
                <= M2 * rs.denominator)

    def bucket(self, M2: int, fours: int) -> int:
        """Smallest j with (j/64)^2 r_out^2 >= M2/fours, capped."""
        rs = self.radius_sq
        # r_out^2 = radius_sq * (17/16)^2 >= radius_up^2 * (17/16)^2... use
        # radius_sq*289/256 as a lower bound on r_out^2 is wrong direction;
        # conservatively bucket against radius_sq itself (r_out >= radius).
        t = M2 * rs.denominator * 4096
        d = rs.numerator * fours
        j = math.isqrt(t // d)
        while j * j * d < t:
            j += 1
        return min(max(j, 1), _BUCKETS)

    def margin_int(self, depth: int, bucket: int) -> int:
        """Conservative integer M: discharge iff isqrt(n2) > M at this
        depth/bucket (encodes threshold + slack + lip*halfdiag)."""
        key = (depth, bucket)
        got = self._margin_cache.get(key)
        if got is None:
            halfdiag = Fraction(self.bsn, 1 << (_BASE_BITS + depth + 1)) * _SQRT2_UP
            rhs = self.threshold + self.slack + self.lip[bucket] * halfdiag
            sbits = _BASE_BITS + depth + 1
            scale = (1 << (sbits * self.deg)) * self.den
            got = math.ceil(rhs * scale)
            self._margin_cache[key] = got
        return got

    def eval_sqrt_n2(self, ix: int, iy: int, depth: int) -> tuple[int, int]:
        """(isqrt(|H|^2), scale) at the box center, H = h * scale."""
        bsn = self.bsn
        ax = (2 * ix + 1) * bsn
        ay = (2 * iy + 1) * bsn
        sbits = _BASE_BITS + depth + 1
        c = self.ints
        acc_re = c[self.deg]
        acc_im = 0
        shift = 1 << sbits
        p = 1
        for i in range(self.deg - 1, -1, -1):
            p *= shift
            acc_re, acc_im = (acc_re * ax - acc_im * ay + c[i] * p,
                              acc_re * ay + acc_im * ax)
        scale = self._scale_cache.get(sbits)
        if scale is None:
            scale = (1 << (sbits * self.deg)) * self.den
            self._scale_cache[sbits] = scale
        return math.isqrt(acc_re * acc_re + acc_im * acc_im), scale

    def lower_bound(self, root: int, scale: int, depth: int, bucket: int) -> Fraction:
        halfdiag = Fraction(self.bsn, 1 << (_BASE_BITS + depth + 1)) * _SQRT2_UP
        return (Fraction(root, scale) - self.slack
                - self.lip[bucket] * halfdiag)


def certify_nonvanishing(h, q: int, max_depth: int = 40,
                         threshold: Fraction = Fraction(0),
                         radius_sq: Fraction | None = None,
                         mu_target: Fraction | None = None,
                         mu_extra_splits: int = 20000) -> DiskCertificate:
    """Certify |h| > threshold on the closed disk |z|^2 <= radius_sq
    (default 1/q) and produce a certified lower bound mu for |h| on the
    boundary circle.

    h must have real (rational or enclosure) coefficients and h(0) != 0.
    Hitting max_depth with an undischarged box returns nonvanishing=False
    with mu=0 (inconclusive, not a disproof).
    """
    h = normalize(list(h))
    h0_zero = h and (h[0].contains(0) if isinstance(h[0], RatInterval)
                     else Fraction(h[0]) == 0)
    if not h or h0_zero:
        raise ValueError("h(0) = 0: trivially vanishing at the disk center")
    if radius_sq is None:
        radius_sq = Fraction(1, q)
    radius_sq = Fraction(radius_sq)
    eng = _Engine(h, radius_sq, Fraction(threshold))

    if eng.deg == 0:
        v = abs(Fraction(eng.ints[0], eng.den)) - eng.slack
        ok = v > threshold
        v = max(v, Fraction(0))
        return DiskCertificate(nonvanishing=ok, mu=v, subdivision_depth=0,
                               boxes_examined=1, min_modulus=v)

    # upper half cover suffices: real coefficients give h(conj z)=conj h(z)
    queue = [(-1, 0, 0), (0, 0, 0)]  # (ix, iy, depth)
    examined = 0
    deepest = 0
    min_mod: Fraction | None = None
    boundary: list[tuple[Fraction, tuple[int, int, int]]] = []

    while queue:
        ix, iy, depth = queue.pop()
        examined += 1
        if depth > deepest:
            deepest = depth
        m2, M2, fours = eng._corner_minmax2(ix, iy, depth)
        if eng.outside(m2, fours):
            continue
        bucket = eng.bucket(M2, fours)
        root, scale = eng.eval_sqrt_n2(ix, iy, depth)
        if root > eng.margin_int(depth, bucket):
            lb = eng.lower_bound(root, scale, depth, bucket)
            min_mod = lb if min_mod is None else min(min_mod, lb)
            if eng.touches_boundary(m2, M2, fours):
                boundary.append((lb, (ix, iy, depth)))
            continue
        if depth >= max_depth:
            return DiskCertificate(nonvanishing=False, mu=Fraction(0),
                                   subdivision_depth=deepest,
                                   boxes_examined=examined,
                                   min_modulus=Fraction(0))
        jx, jy, d = 2 * ix, 2 * iy, depth + 1
        queue.append((jx, jy, d))
        queue.append((jx + 1, jy, d))
        queue.append((jx, jy + 1, d))
        queue.append((jx + 1, jy + 1, d))

    if mu_target is not None and boundary:
        heap = [(lb, i, box) for i, (lb, box) in enumerate(boundary)]
        heapq.heapify(heap)
        counter = len(heap)
        budget = mu_extra_splits
        while budget > 0 and heap and heap[0][0] < mu_target:
            lb, _, (ix, iy, depth) = heapq.heappop(heap)
            if depth >= max_depth + 16:
                heapq.heappush(heap, (lb, counter, (ix, iy, depth)))
                break
            for jx, jy in ((2 * ix, 2 * iy), (2 * ix + 1, 2 * iy),
                           (2 * ix, 2 * iy + 1), (2 * ix + 1, 2 * iy + 1)):
                counter += 1
                budget -= 1
                examined += 1
                d = depth + 1
                m2, M2, fours = eng._corner_minmax2(jx, jy, d)
                if eng.outside(m2, fours) or not eng.touches_boundary(m2, M2, fours):
                    continue
                bucket = eng.bucket(M2, fours)
                root, scale = eng.eval_sqrt_n2(jx, jy, d)
                clb = eng.lower_bound(root, scale, d, bucket)
                deepest = max(deepest, d)
                heapq.heappush(heap, (max(clb, Fraction(0)), counter, (jx, jy, d)))
        boundary = [(lb, box) for lb, _, box in heap]

    mu = min((lb for lb, _ in boundary), default=min_mod or Fraction(0))
    mu = max(mu, Fraction(0))
    return DiskCertificate(nonvanishing=True, mu=mu, subdivision_depth=deepest,
                           boxes_examined=examined,
                           min_modulus=max(min_mod or Fraction(0), Fraction(0)))


def mu_ord(mu: Fraction, q: int, n: int, prec: int = 80) -> Fraction:
    """mu - q^(-(n-1)/2) - ((q+1)/2) q^(-n/2), as a certified lower bound.

    Negative result signals the abort path upstream.
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    inv_sqrt_q_up = sqrt_interval(Fraction(1, q), prec).hi
    t1 = inv_sqrt_q_up ** (n - 1)
    t2 = Fraction(q + 1, 2) * inv_sqrt_q_up ** n
    return Fraction(mu) - t1 - t2
