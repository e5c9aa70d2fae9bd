"""Interval realization: from a certified seed polynomial h, compute the
radius N such that every integer in [hat(h)(1) - N, hat(h)(1) + N] is the
order of an ordinary abelian variety, and realize any given target in it
by a greedy coefficient perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .disks import DiskCertificate, certify_nonvanishing, mu_ord
from .exponential import ConstructionError
from .intervals import sqrt_interval
from .weil import Certificate, WeilCandidate, certify, hat_value_at_1, prime_power


@dataclass(frozen=True)
class RealizedInterval:
    q: int
    n: int
    center: int
    radius: int       # N
    r: int            # first perturbable exponent
    mu: Fraction
    mu_ord: Fraction
    disk: DiskCertificate
    seed: tuple[Fraction, ...]

    @property
    def lo(self) -> int:
        return self.center - self.radius

    @property
    def hi(self) -> int:
        return self.center + self.radius


def _perturbation_budget(q: int, n: int, r: int, prec: int = 80) -> Fraction:
    """Certified upper bound for sum_{i=r}^n floor(q/2) q^(-i/2)."""
    up = sqrt_interval(Fraction(1, q), prec).hi
    total = Fraction(0)
    for i in range(r, n + 1):
        total += up ** i
    return (q // 2) * total


def realize_interval(h, q: int, n: int, max_depth: int = 40,
                     mu_splits: int = 20000) -> RealizedInterval:
    """Steps: certify h nonvanishing on the disk with a boundary bound mu;
    pass to mu_ord; take the least r <= n+1 whose perturbation budget stays
    below mu_ord; N = floor(q/2) ((q^(n-r+1)-1)/(q-1) + (n-r+1))."""
    h = [Fraction(c) for c in h]
    if not h or h[0] != 1:
        raise ValueError("seed must have h(0) = 1")
    if len(h) - 1 >= 2 * n:
        raise ValueError("seed must have degree < 2n")
    center = hat_value_at_1(h, n, q)
    if center.denominator != 1:
        raise ValueError("hat(h)(1) is not an integer")
    center = int(center)
    # mu must clear the ordinarity slack; ask the subdivision to refine the
    # boundary boxes until comfortably past it (cheap when already there)
    slack = Fraction(1) - mu_ord(Fraction(1), q, n)
    disk = certify_nonvanishing(h, q, max_depth=max_depth,
                                mu_target=2 * slack,
                                mu_extra_splits=mu_splits)
    if not disk.nonvanishing:
        raise ConstructionError("disk", "nonvanishing inconclusive for seed")
    mu = disk.mu
    mo = mu_ord(mu, q, n)
    if mo <= 0:
        raise ConstructionError("mu_ord", f"mu_ord = {mo} <= 0: abort")
    r = None
    for cand in range(1, n + 2):
        if _perturbation_budget(q, n, cand) < mo:
            r = cand
            break
    assert r is not None  # the empty sum at r = n+1 is 0 < mo
    radius = (q // 2) * ((q ** (n - r + 1) - 1) // (q - 1) + (n - r + 1))
    return RealizedInterval(q=q, n=n, center=center, radius=radius, r=r,
                            mu=mu, mu_ord=mo, disk=disk, seed=tuple(h))


def greedy_decompose(M: int, q: int, n: int, r: int) -> list[Fraction]:
    """M = sum_{j=r}^n c_j (q^(n-j) + 1) with |c_j| <= floor(q/2), integer
    c_j for j < n and half-integer c_n.

    Greedy: at each j take the smallest |c_j| keeping the residual within
    the downstream budget, preferring the nonnegative choice on ties.
    """
    half = q // 2
    budgets = []
    for j in range(r, n + 2):
        budgets.append(sum(half * (q ** (n - i) + 1) for i in range(j, n)))
    out: list[Fraction] = []
    cur = M
    for idx, j in enumerate(range(r, n)):
        w = q ** (n - j) + 1
        tail = budgets[idx + 1] + 2 * half  # includes the half-integer slot
        chosen = None
        for mag in range(half + 1):
            for c in ((mag, -mag) if mag else (0,)):
                if abs(cur - c * w) <= tail:
                    chosen = c
                    break
            if chosen is not None:
                break
        if chosen is None:
            raise ConstructionError("greedy", f"no c_{j} keeps the residual bounded")
        out.append(Fraction(chosen))
        cur -= chosen * w
    c_n = Fraction(cur, 2)
    if abs(c_n) > half:
        raise ConstructionError("greedy", "final half-integer out of range")
    out.append(c_n)
    return out


def realize_integer(h, q: int, n: int, target: int,
                    interval: RealizedInterval | None = None,
                    max_depth: int = 40) -> tuple[WeilCandidate, Certificate]:
    """Realize `target` = hat(h)(1) + M with |M| <= N by perturbing
    coefficients r..n of h, then adjusting for ordinarity; the final H is
    re-certified from scratch (nonvanishing and Honda-Tate)."""
    if interval is None:
        interval = realize_interval(h, q, n, max_depth=max_depth)
    if not interval.lo <= target <= interval.hi:
        raise ValueError(f"target outside [{interval.lo}, {interval.hi}]")
    p, _ = prime_power(q)
    M = target - interval.center
    cs = greedy_decompose(M, q, n, interval.r)
    H = list(interval.seed) + [Fraction(0)] * max(0, n + 1 - len(interval.seed))
    for j, c in zip(range(interval.r, n + 1), cs):
        H[j] += c
    # ordinarity adjustment: hat(H)^[n] = 2 H^[n] when deg H <= n
    if (2 * H[n]).denominator != 1:
        raise ConstructionError("greedy", "2 H^[n] not integral")
    if int(2 * H[n]) % p == 0:
        H[n - 1] += 1
        H[n] -= Fraction(q + 1, 2)
    # assemble hat(H) exactly
    f = [Fraction(0)] * (2 * n + 1)
    qn = q ** n
    for i, c in enumerate(H):
        f[2 * n - i] += c
        f[i] += c * qn / q ** i
    assert all(c.denominator == 1 for c in f)
    fi = [int(c) for c in f]
    assert sum(fi) == target
    disk = certify_nonvanishing(H, q, max_depth=max_depth)
    if not disk.nonvanishing:
        raise ConstructionError("disk", "perturbed seed lost its certificate")
    cand = WeilCandidate(q=q, n=n, f=tuple(fi), provenance="interval")
    cert = certify(cand, require_ordinary=True)
    if cert.honda_tate != "VerifiedOrdinary" or cert.order != target:
        raise ConstructionError("certify", f"certification failed: {cert}")
    return cand, cert
