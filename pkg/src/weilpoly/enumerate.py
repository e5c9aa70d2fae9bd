"""Exhaustive enumeration of Weil polynomials for small (q, n).

Search runs over companion polynomials G = x^n + c_1 x^(n-1) + ... + c_n
whose roots must all lie in [-2 sqrt(q), 2 sqrt(q)].  The DFS prunes with
the interlacing condition: the normalized (n-i)-th derivative P_i must
itself have all real roots in the interval, which confines c_i to an
interval computed from the critical points of P_{i-1}.  Those bounds are
computed in floating point with a safety margin (pruning must never drop
a valid branch); every surviving leaf is accepted or rejected by an exact
integer Sturm test, so the output is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import polys
from .weil import (Certificate, WeilCandidate, companion_basis, newton_slopes,
                   prime_power, FAILED, UNKNOWN, VERIFIED_NEWTON,
                   VERIFIED_ORDINARY, VERIFIED_PRIME_Q)
from .polys import SqrtBound, sturm_count

MODES = ("any", "ordinary", "squarefree", "ordinary+squarefree")


@dataclass(frozen=True)
class EnumTask:
    q: int
    n: int
    mode: str = "any"
    prefix: tuple[int, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n > 6:
            raise ValueError("enumeration guard: n <= 6")
        if self.n < 1:
            raise ValueError("n >= 1 required")


# ---------------------------------------------------------------------------
# exact leaf acceptance

def companion_circle_data(g: list[int], q: int) -> tuple[bool, bool]:
    """(all roots of G in [-2 sqrt q, 2 sqrt q], induced f squarefree).

    f is squarefree iff G is squarefree and no root of G sits at an
    endpoint +-2 sqrt(q).
    """
    g = polys.normalize(g)
    d = polys.deg(g)
    if d <= 0:
        return True, True
    if d == 1:
        # root -c1 in [-B, B]  <=>  c1^2 <= 4q
        c1 = g[0] if g[1] == 1 else Fraction(g[0], g[1])
        c1sq = c1 * c1
        return c1sq <= 4 * q, c1sq != 4 * q
    if d == 2 and g[2] == 1:
        c1, c2 = g[1], g[0]
        disc = c1 * c1 - 4 * c2
        gB = polys.sign_quad(4 * q + c2, 2 * c1, q)    # sign of G(2 sqrt q)
        gmB = polys.sign_quad(4 * q + c2, -2 * c1, q)  # sign of G(-2 sqrt q)
        on = disc >= 0 and c1 * c1 <= 16 * q and gB >= 0 and gmB >= 0
        return on, disc != 0 and gB != 0 and gmB != 0
    gsf = polys.squarefree_part(g)
    dsf = polys.deg(gsf)
    g_squarefree = dsf == d
    s = math.isqrt(4 * q)
    boundary_root = False
    work = gsf
    if s * s == 4 * q:
        for r in (s, -s):
            while polys.evaluate(work, r) == 0:
                boundary_root = True
                quo, rem = polys.divmod_exact(work, [-r, 1])
                assert not rem
                work = polys.to_int_poly(quo)
        dw = polys.deg(work)
        on_circle = dw <= 0 or sturm_count(work, Fraction(-s), Fraction(s)) == dw
    else:
        quo, rem = polys.divmod_exact(work, [-4 * q, 0, 1])
        if not rem:
            boundary_root = True
            work = polys.to_int_poly(quo)
        dw = polys.deg(work)
        on_circle = dw <= 0 or sturm_count(
            work, SqrtBound(-2), SqrtBound(2), q=q) == dw
    return on_circle, g_squarefree and not boundary_root


def certificate_for_companion(g: list[int], f: list[int], q: int, n: int,
                              p: int, e: int, squarefree: bool) -> Certificate:
    """Certificate for an f already known to be q-symmetric with all roots
    on the circle (the enumerator's exact leaf test)."""
    slopes = newton_slopes(f, p, e)
    p_rank = sum(1 for sl in slopes if sl == 0)
    ordinary = f[n] % p != 0
    if ordinary:
        verdict = VERIFIED_ORDINARY
    elif e == 1:
        verdict = VERIFIED_PRIME_Q
    elif all(sl == 0 or sl == 1 for sl in slopes):
        verdict = VERIFIED_NEWTON
    else:
        verdict = UNKNOWN
    return Certificate(q_symmetric=True, roots_on_circle=True,
                       ordinary=ordinary, honda_tate=verdict, p_rank=p_rank,
                       order=sum(f), squarefree=squarefree)


# ---------------------------------------------------------------------------
# the DFS

def _float_roots_clipped(coeffs: list[float], bound: float) -> list[float]:
    """Real parts of the roots of an (expected real-rooted) polynomial,
    clipped to [-bound, bound] and sorted."""
    arr = np.array(coeffs[::-1], dtype=float)
    if len(arr) <= 1:
        return []
    r = np.roots(arr)
    vals = sorted(float(x) for x in r.real)
    return [min(max(v, -bound), bound) for v in vals]


def _c_range(qi: list[float], crit: list[float], i: int, n: int,
             bound: float) -> tuple[int, int] | None:
    """Integer range for c_i given Q_i (floats, ascending) and the critical
    points of P_{i-1}; returns None when certainly empty."""

    def ev(x: float) -> float:
        acc = 0.0
        for c in reversed(qi):
            acc = acc * x + c
        return acc

    lo = -math.inf
    hi = math.inf
    for k, r in enumerate(crit, start=1):
        v = -ev(r)
        if (i - k) % 2 == 0:
            lo = max(lo, v)
        else:
            hi = min(hi, v)
    v = -ev(bound)
    lo = max(lo, v)
    v = -ev(-bound)
    if i % 2 == 0:
        lo = max(lo, v)
    else:
        hi = min(hi, v)
    binom = math.comb(n, i)
    scale = sum(abs(c) * bound ** j for j, c in enumerate(qi)) + 1.0
    margin = 1e-9 * scale + 1e-7
    clo = math.ceil((lo - margin) * binom)
    chi = math.floor((hi + margin) * binom)
    if clo > chi:
        return None
    return clo, chi


def _integrate(p: list[float], factor: float) -> list[float]:
    """antiderivative of factor * p with zero constant term."""
    return [0.0] + [factor * c / (k + 1) for k, c in enumerate(p)]


def enum_weil(task: EnumTask) -> Iterator[tuple[WeilCandidate, Certificate]]:
    """Stream all Weil candidates for (q, n) passing the mode filter, in
    lexicographic order of the companion coefficient vector (c_1..c_n).

    mode "any" also emits candidates whose Honda-Tate condition (d') is
    Unknown (flagged in the certificate); Failed never occurs here since
    the circle test already passed.
    """
    q, n, mode = task.q, task.n, task.mode
    p, e = prime_power(q)
    bound = 2.0 * math.sqrt(q)
    basis = companion_basis(q, n)
    want_ordinary = "ordinary" in mode
    want_squarefree = "squarefree" in mode
    prefix = task.prefix

    def expand(gvec: list[int]) -> list[int]:
        out = [0] * (2 * n + 1)
        for k, c in enumerate(gvec):
            if c:
                row = basis[k]
                for idx, b in enumerate(row):
                    if b:
                        out[idx] += c * b
        return out

    # stack of (level i, c-prefix, P_{i-1} floats)
    def rec(i: int, cs: list[int], p_prev: list[float]):
        qi = _integrate(p_prev, float(i))
        crit = _float_roots_clipped(p_prev, bound) if i >= 2 else []
        rng = _c_range(qi, crit, i, n, bound)
        if rng is None:
            return
        clo, chi = rng
        if len(prefix) >= i:
            want = prefix[i - 1]
            if want < clo or want > chi:
                return
            clo = chi = want
        binom = math.comb(n, i)
        for ci in range(clo, chi + 1):
            pi = list(qi)
            pi[0] += ci / binom
            if i == n:
                gvec = [0] * (n + 1)
                gvec[n] = 1
                for j, c in enumerate(cs, start=1):
                    gvec[n - j] = c
                gvec[0] = ci
                # cs holds c_1..c_{n-1}; positions n-1..1; constant = c_n
                on_circle, f_squarefree = companion_circle_data(gvec, q)
                if not on_circle:
                    continue
                if want_squarefree and not f_squarefree:
                    continue
                f = expand(gvec)
                cert = certificate_for_companion(gvec, f, q, n, p, e,
                                                 f_squarefree)
                if want_ordinary and not cert.ordinary:
                    continue
                cand = WeilCandidate(q=q, n=n, f=tuple(f),
                                     provenance="enumerate")
                yield cand, cert
            else:
                yield from rec(i + 1, cs + [ci], pi)

    yield from rec(1, [], [1.0])


def count_enum(q: int, n: int, mode: str = "any") -> int:
    return sum(1 for _ in enum_weil(EnumTask(q=q, n=n, mode=mode)))


# ---------------------------------------------------------------------------
# realizable order sets

@dataclass
class RealizableSet:
    """Orders realized for q in dimensions up to n_max under a mode.

    `orders` maps each certified-realizable order to its witness (the
    lexicographically smallest companion vector at the smallest n).
    Orders whose only candidates carry an Unknown (d') verdict are listed
    separately in `unknown_orders` and never counted as realizable.
    """
    q: int
    n_max: int
    mode: str
    orders: dict[int, WeilCandidate] = field(default_factory=dict)
    unknown_orders: dict[int, WeilCandidate] = field(default_factory=dict)

    def realizable(self) -> set[int]:
        return set(self.orders)


def realizable_orders(q: int, n_max: int, mode: str = "any") -> RealizableSet:
    if n_max > 6:
        raise ValueError("enumeration guard: n_max <= 6")
    out = RealizableSet(q=q, n_max=n_max, mode=mode)
    # the trivial (dimension 0) abelian variety realizes order 1
    out.orders[1] = WeilCandidate(q=q, n=0, f=(1,), provenance="trivial")
    for n in range(1, n_max + 1):
        for cand, cert in enum_weil(EnumTask(q=q, n=n, mode=mode)):
            m = cert.order
            if cert.verified:
                if m not in out.orders:
                    out.orders[m] = cand
            elif cert.honda_tate == UNKNOWN:
                if m not in out.unknown_orders:
                    out.unknown_orders[m] = cand
    for m in out.orders:
        out.unknown_orders.pop(m, None)
    return out


# ---------------------------------------------------------------------------
# exceptions (confirmed-unrealizable integers)

def _min_order_exceeds(q: int, n: int, v: int) -> bool:
    """Exact test (sqrt(q)-1)^(2n) > v, i.e. dimension n cannot reach v."""
    # (sqrt(q)-1)^2 = q+1 - 2 sqrt(q); expand ((q+1) - 2 sqrt q)^n exactly
    a, b = 1, 0  # a + b sqrt(q)
    for _ in range(n):
        a, b = a * (q + 1) - 2 * q * b, b * (q + 1) - 2 * a
    # compare a + b sqrt(q) > v  <=>  sign of (a - v) + b sqrt(q)
    return polys.sign_quad(a - v, b, q) > 0


@dataclass(frozen=True)
class ExceptionsReport:
    q: int
    bound: int
    mode: str
    n_enumerated: int
    values: tuple[int, ...]          # confirmed unrealizable <= bound
    unconfirmed: tuple[int, ...]     # absent but not settled within n_max
    dimension_limited: bool

    def __iter__(self):
        return iter(self.values)


def exceptions(q: int, bound: int, mode: str = "any",
               n_max: int | None = None, n_cap: int = 4) -> ExceptionsReport:
    """Integers in [1, bound] that are not realizable orders.

    A value is confirmed absent only when every dimension that could reach
    it (Hasse-Weil lower bound <= value) has been enumerated; otherwise it
    lands in `unconfirmed` and the report is flagged dimension-limited.
    """
    if n_max is None:
        # dimensions whose minimal order exceeds the bound cannot matter
        n_max = 1
        while n_max < n_cap and not _min_order_exceeds(q, n_max + 1, bound):
            n_max += 1
    rs = realizable_orders(q, n_max, mode)
    realized = rs.realizable()
    confirmed = []
    unconfirmed = []
    for v in range(1, bound + 1):
        if v in realized:
            continue
        settled = n_max >= 6 or _min_order_exceeds(q, n_max + 1, v)
        (confirmed if settled else unconfirmed).append(v)
    return ExceptionsReport(q=q, bound=bound, mode=mode, n_enumerated=n_max,
                            values=tuple(confirmed),
                            unconfirmed=tuple(unconfirmed),
                            dimension_limited=bool(unconfirmed))


# ---------------------------------------------------------------------------
# figure data: (order, c1) per isogeny class at n=2

def figure_data(q: int, n: int = 2, include_unknown: bool = False
                ) -> list[tuple[int, int]]:
    """(order, c1) points, one per enumerated class with a verified
    certificate; c1 is the x^(n-1) companion coefficient."""
    if n != 2:
        raise ValueError("figure data is defined for n = 2")
    if q > 2000:
        raise ValueError("figure guard: q <= 2000")
    pts = []
    for cand, cert in enum_weil(EnumTask(q=q, n=n)):
        if not (cert.verified or include_unknown):
            continue
        c1 = cand.f[2 * n - 1]  # = G^[n-1]
        pts.append((cert.order, c1))
    return pts
