"""Congruence target g mod L: coefficient residues that force any
conforming abelian variety to be ordinary, geometrically simple, and
isogenous to a principally polarized one.

Finite-field polynomial arithmetic is over Z/m with dense integer lists
(m prime except for the lift mod lambda^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .weil import prime_power

# ---------------------------------------------------------------------------
# small number theory helpers

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def is_square_mod(a: int, ell: int) -> bool:
    """a a nonzero square mod odd prime ell."""
    a %= ell
    if a == 0:
        return False
    return pow(a, (ell - 1) // 2, ell) == 1


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    d = (a2 - a1) * pow(m1, -1, m2) % m2
    return a1 + m1 * d


# ---------------------------------------------------------------------------
# polynomials over Z/m (dense ascending lists of ints in [0, m))

def gf_norm(p: list[int], m: int) -> list[int]:
    p = [c % m for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def gf_add(a, b, m):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % m
    return gf_norm(out, m)


def gf_mul(a, b, m):
    a, b = gf_norm(a, m), gf_norm(b, m)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return gf_norm(out, m)


def gf_eval(p, x, m):
    acc = 0
    for c in reversed(p):
        acc = (acc * x + c) % m
    return acc


def gf_divmod(a, b, m):
    """Division in (Z/m)[x]; leading coefficient of b must be invertible."""
    a, b = gf_norm(a, m), gf_norm(b, m)
    if not b:
        raise ZeroDivisionError
    inv = pow(b[-1], -1, m)
    q = [0] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b):
        c = r[-1] * inv % m
        k = len(r) - len(b)
        q[k] = c
        for i in range(len(b)):
            r[k + i] = (r[k + i] - c * b[i]) % m
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return gf_norm(q, m), r


def gf_gcd(a, b, m):
    a, b = gf_norm(a, m), gf_norm(b, m)
    while b:
        _, r = gf_divmod(a, b, m)
        a, b = b, r
    if a:  # monic normalization
        inv = pow(a[-1], -1, m)
        a = [c * inv % m for c in a]
    return a


def gf_pow_mod(base, k, mod_poly, m):
    """base^k mod (mod_poly) over Z/m."""
    out = [1]
    b = gf_divmod(base, mod_poly, m)[1]
    while k:
        if k & 1:
            out = gf_divmod(gf_mul(out, b, m), mod_poly, m)[1]
        b = gf_divmod(gf_mul(b, b, m), mod_poly, m)[1]
        k >>= 1
    return out


def gf_deriv(p, m):
    return gf_norm([i * c for i, c in enumerate(p)][1:], m)


def gf_is_irreducible(f, ell: int) -> bool:
    """Ben-Or irreducibility test over F_ell for monic f of degree >= 1:
    f is irreducible iff gcd(x^(ell^k) - x, f) = 1 for k = 1..deg(f)//2.
    Rejects reducible candidates early, which dominates in searches."""
    f = gf_norm(f, ell)
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    t = [0, 1]
    minus_x = [0, ell - 1]
    for _ in range(n // 2):
        t = gf_pow_mod(t, ell, f, ell)
        g = gf_gcd(gf_add(t, minus_x, ell), f, ell)
        if len(g) - 1 != 0:
            return False
    return True


def iter_monic(ell: int, n: int):
    """Monic degree-n polynomials over F_ell in lexicographic order of
    (a_0, a_1, ..., a_{n-1})."""
    total = ell ** n
    for code in range(total):
        coeffs = []
        c = code
        for _ in range(n):
            coeffs.append(c % ell)
            c //= ell
        yield coeffs + [1]


def reversed_twist(j, q: int, ell: int) -> list[int]:
    """x^n j(q/x) for monic j of degree n, over F_ell (not normalized)."""
    n = len(j) - 1
    out = [0] * (n + 1)
    for i, a in enumerate(j):
        out[n - i] = a * pow(q, i, ell) % ell
    return gf_norm(out, ell)


# ---------------------------------------------------------------------------
# the five building blocks

def find_lambda(q: int) -> int:
    """Smallest prime lam with 7 <= lam < q^3, lam != p, q a nonzero
    square mod lam."""
    p, _ = prime_power(q)
    lam = 7
    while lam < q ** 3:
        if is_prime(lam) and lam != p and is_square_mod(q, lam):
            return lam
        lam += 1
    raise RuntimeError("no lambda found below q^3")  # ruled out by theory


def irreducible_pair(ell: int, q: int, n: int) -> list[int]:
    """Monic irreducible j of degree n over F_ell with j(1) != 0, j(q) != 0,
    and x^n j(q/x) irreducible and coprime to j.

    Deterministic lexicographic search; every postcondition is checked, so
    correctness does not rest on the existence proof's generator device.
    """
    if ell < 7 or not is_prime(ell) or q % ell == 0:
        raise ValueError("need prime ell >= 7 not dividing q")
    if n == 1:
        candidates = ([(-a) % ell, 1] for a in range(ell))
    else:
        candidates = iter_monic(ell, n)
    for j in candidates:
        if j[0] == 0:
            continue  # x | j
        if gf_eval(j, 1, ell) == 0 or gf_eval(j, q, ell) == 0:
            continue
        if not gf_is_irreducible(j, ell):
            continue
        rev = reversed_twist(j, q, ell)
        if len(rev) - 1 != n:
            continue
        inv = pow(rev[-1], -1, ell)
        rev_monic = [c * inv % ell for c in rev]
        if rev_monic == j:
            continue  # not coprime (associates)
        if not gf_is_irreducible(rev_monic, ell):
            continue
        return j
    raise RuntimeError("no irreducible pair found")  # ruled out by theory


def _pair_poly(j, q: int, ell: int) -> list[int]:
    """j * x^deg(j) j(q/x) scaled monic: q-symmetric of degree 2 deg j with
    root pairs {alpha, q/alpha} from the roots of j."""
    g = gf_mul(j, reversed_twist(j, q, ell), ell)
    inv = pow(g[-1], -1, ell)
    return [c * inv % ell for c in g]


def cycle_type_poly(ell: int, q: int, n: int, m: int,
                    partition: tuple[int, ...]) -> list[int]:
    """Monic q-symmetric g of degree 2n over F_ell with g(1) = m and
    Frobenius acting on the n root pairs {alpha, q/alpha} with the given
    cycle type.  Parts != 1 must be distinct; 1 appears once or twice."""
    if sum(partition) != n:
        raise ValueError("partition must sum to n")
    ones = [d for d in partition if d == 1]
    big = sorted((d for d in partition if d > 1), reverse=True)
    if len(ones) not in (1, 2) or len(set(big)) != len(big):
        raise ValueError("1 once or twice; other parts distinct")
    g = [1]
    big_factors = []
    for d in big:
        j = irreducible_pair(ell, q, d)
        gi = _pair_poly(j, q, ell)
        big_factors.append(gi)
        g = gf_mul(g, gi, ell)
    v = gf_eval(g, 1, ell)  # nonzero: j(1), j(q) != 0
    assert v != 0
    qp1 = (q + 1) % ell
    if len(ones) == 1:
        # unique a with (1 - a + q) * v = m
        a = (qp1 - m * pow(v, -1, ell)) % ell
        quad = gf_norm([q, -a, 1], ell)
        g = gf_mul(g, quad, ell)
    else:
        # lexicographically smallest (a1, a2) with (1+q-a1)(1+q-a2) = m/v
        target = m * pow(v, -1, ell) % ell
        found = None
        for a1 in range(ell):
            u1 = (qp1 - a1) % ell
            if u1 == 0:
                if target != 0:
                    continue
                a2 = next(x for x in range(ell) if x != a1)
            else:
                if target == 0:
                    a2 = qp1  # force the zero factor
                else:
                    a2 = (qp1 - target * pow(u1, -1, ell)) % ell
                if a2 == a1:
                    continue
            found = (a1, a2)
            break
        if found is None:
            raise RuntimeError("no (a1, a2) choice")  # ruled out: ell - 1 > 4
        a1, a2 = found
        g = gf_mul(g, gf_norm([q, -a1, 1], ell), ell)
        g = gf_mul(g, gf_norm([q, -a2, 1], ell), ell)
    assert gf_eval(g, 1, ell) == m % ell
    return g


def no_elliptic_factor_poly(ell0: int, q: int, n: int, m: int) -> list[int]:
    """g = j * x^n j(q/x) over F_ell0 with g(1) = m and no factor
    x^2 - a x + q for integer |a| <= 2 sqrt(q)."""
    if (ell0 - q - 1) ** 2 <= 4 * q or ell0 <= q + 1:
        raise ValueError("need ell0 > q + 2 sqrt(q) + 1")
    if (n - 5) ** 2 < 64 * q or n < 5:
        raise ValueError("need n >= 8 sqrt(q) + 5")
    amax = math.isqrt(4 * q)
    # CRT conditions: j = 1 mod each quadratic, j(0)=1, j(1)=m, j(q)=1
    moduli: list[list[int]] = [[0, 1], [ell0 - 1, 1], [(-q) % ell0, 1]]
    values: list[list[int]] = [[1], [m % ell0], [1]]
    for a in range(-amax, amax + 1):
        moduli.append(gf_norm([q, -a, 1], ell0))
        values.append([1])
    # pairwise coprimality holds by the size conditions on ell0
    M = [1]
    for mod in moduli:
        M = gf_mul(M, mod, ell0)
    j = []
    for mod, val in zip(moduli, values):
        Mi, _ = gf_divmod(M, mod, ell0)
        # invert Mi mod `mod`
        inv = _gf_invert_mod(Mi, mod, ell0)
        term = gf_mul(gf_mul(val, Mi, ell0), inv, ell0)
        j = gf_add(j, gf_divmod(term, M, ell0)[1], ell0)
    j = gf_divmod(j, M, ell0)[1]
    degM = len(M) - 1
    if degM > n:
        raise ValueError("n too small for the interpolation conditions")
    # monic lift of degree n
    lead = [0] * (n - degM) + [1]
    j = gf_add(gf_mul(lead, M, ell0), j, ell0)
    g = _pair_poly(j, q, ell0)
    # postcondition replay: no quadratic factor
    for a in range(-amax, amax + 1):
        _, r = gf_divmod(g, gf_norm([q, -a, 1], ell0), ell0)
        assert r, "quadratic factor slipped through"
    assert gf_eval(g, 1, ell0) == m % ell0
    return g


def _gf_invert_mod(a, mod, ell):
    """Inverse of a modulo `mod` in F_ell[x] (extended Euclid)."""
    r0, r1 = gf_divmod(a, mod, ell)[1], mod
    s0, s1 = [1], []
    # invariant: r0 = s0 * a mod `mod`
    while True:
        if not r1:
            break
        q_, r2 = gf_divmod(r0, r1, ell)
        s2 = gf_add(s0, gf_norm([-c for c in gf_mul(q_, s1, ell)], ell), ell)
        r0, r1 = r1, r2
        s0, s1 = s1, s2
    if len(r0) != 1:
        raise ZeroDivisionError("not invertible")
    inv = pow(r0[0], -1, ell)
    return gf_norm([c * inv for c in s0], ell)


def ppav_poly(lam: int, q: int, n: int, m: int) -> list[int]:
    """g = x^n R(x + q/x) mod lam^2 guaranteeing a principally polarized
    member in the isogeny class (via ramification of K/K+ above lam)."""
    if lam < 7 or not is_prime(lam) or not is_square_mod(q, lam):
        raise ValueError("need prime lam >= 7 with q a nonzero square")
    if n < 5:
        raise ValueError("need n >= 5")
    lam2 = lam * lam
    # s with v_lam(s^2 - 4q) == 1 and q + 1 - s nonzero mod lam
    s = None
    for cand in range(1, lam2):
        d = (cand * cand - 4 * q) % lam2
        if d % lam == 0 and d != 0 and (q + 1 - cand) % lam != 0:
            s = cand
            break
    if s is None:
        raise RuntimeError("no s found")  # Hensel guarantees one
    sbar = s % lam
    # monic irreducible S of degree n-3 (>= 2, so no roots in F_lam)
    S = None
    for f in iter_monic(lam, n - 3):
        if gf_is_irreducible(f, lam):
            S = f
            break
    assert S is not None
    # a, b with (q+1-a)(q+1-b) * (q+1-s) * S(q+1) = m and s, a, b distinct
    base = (q + 1 - sbar) * gf_eval(S, q + 1, lam) % lam
    target = m * pow(base, -1, lam) % lam
    found = None
    for u in range(lam):  # u = q + 1 - a
        a = (q + 1 - u) % lam
        if a == sbar:
            continue
        if u == 0:
            if target != 0:
                continue
            b = next(((q + 1 - v) % lam for v in range(lam)
                      if (q + 1 - v) % lam not in (a, sbar)), None)
        else:
            if target == 0:
                continue
            v = target * pow(u, -1, lam) % lam
            b = (q + 1 - v) % lam
            if b == a or b == sbar:
                continue
        if b is not None:
            found = (a, b)
            break
    if found is None:
        raise RuntimeError("no (a,b) choice")  # ruled out: lam - 1 > 4
    a, b = found
    rbar = gf_mul(gf_mul([(-sbar) % lam, 1], [(-a) % lam, 1], lam),
                  gf_mul([(-b) % lam, 1], S, lam), lam)
    assert len(gf_gcd(rbar, gf_deriv(rbar, lam), lam)) == 1  # separable
    assert gf_eval(rbar, q + 1, lam) == m % lam
    # lift R = rbar + lam*(c x + d) so that R(s) = 0, R(q+1) = m mod lam^2
    R = [c % lam2 for c in rbar]
    a1 = (gf_eval(R, s, lam2) // lam) % lam
    b1 = ((gf_eval(R, q + 1, lam2) - m) % lam2) // lam % lam
    det = (s - (q + 1)) % lam
    c = (b1 - a1) * pow(det, -1, lam) % lam
    d = (-a1 - c * s) % lam
    R[0] = (R[0] + lam * d) % lam2
    R[1] = (R[1] + lam * c) % lam2
    assert gf_eval(R, s, lam2) == 0
    assert gf_eval(R, q + 1, lam2) == m % lam2
    return _companion_expand_mod(R, q, n, lam2)


def _companion_expand_mod(R, q: int, n: int, mod: int) -> list[int]:
    """x^n R(x + q/x) mod `mod` for monic R of degree n."""
    out = [0] * (2 * n + 1)
    for k, c in enumerate(R):
        if c:
            # x^(n-k) (x^2 + q)^k
            for jj in range(k + 1):
                out[n + k - 2 * jj] = (out[n + k - 2 * jj]
                                       + c * math.comb(k, jj) * q ** jj) % mod
    return out


# ---------------------------------------------------------------------------
# assembly

@dataclass(frozen=True)
class CongruenceTarget:
    q: int
    p: int
    n: int
    m_residue: int
    L: int
    factorization: tuple[tuple[int, int], ...]
    g_coeffs: tuple[int, ...]  # length 2n+1, residues mod L

    def check_invariants(self) -> None:
        g = self.g_coeffs
        L, q, n, p = self.L, self.q, self.n, self.p
        assert len(g) == 2 * n + 1
        assert g[2 * n] % L == 1 % L
        assert all(g[i] % L == q ** (n - i) * g[2 * n - i] % L
                   for i in range(n))
        assert sum(g) % L == self.m_residue % L
        assert g[n] % p != 0
        assert L < q ** 23


def select_primes(q: int) -> tuple[int, int, int, int, int, int]:
    """(p, lambda, ell0, ell1, ell2, ell3): smallest admissible distinct
    primes, greedily minimizing L = p lambda^2 ell0 ell1 ell2 ell3."""
    p, _ = prime_power(q)
    lam = find_lambda(q)
    used = {p, lam}
    # ell0 > q + 2 sqrt(q) + 1, i.e. (ell0 - q - 1)^2 > 4q with ell0 > q+1
    ell0 = q + 2
    while (ell0 - q - 1) ** 2 <= 4 * q or not is_prime(ell0) or ell0 in used:
        ell0 += 1
    used.add(ell0)
    small = []
    c = 7
    while len(small) < 3:
        if is_prime(c) and c not in used:
            small.append(c)
            used.add(c)
        c += 1
    return p, lam, ell0, small[0], small[1], small[2]


def assemble_target(q: int, n: int, m: int) -> CongruenceTarget:
    """Pick the primes greedily (smallest admissible), build each block,
    and CRT-combine into g mod L."""
    if n < 5 or (n - 5) ** 2 < 64 * q:
        raise ValueError("need n >= 8 sqrt(q) + 5 (and n >= 5)")
    p, lam, ell0, ell1, ell2, ell3 = select_primes(q)

    # gamma mod p: x^2n + (m-1) x^n, adjusted to keep gamma^[n] nonzero
    gamma = [0] * (2 * n + 1)
    gamma[2 * n] = 1
    gamma[n] = (m - 1) % p
    if gamma[n] == 0:
        gamma[n + 1] = (gamma[n + 1] + 1) % p
        gamma[n] = (gamma[n] - 1) % p
    g_lam = ppav_poly(lam, q, n, m)
    g0 = no_elliptic_factor_poly(ell0, q, n, m)
    parts1 = (n - 1, 1)
    parts2 = (n - 2, 1, 1)
    parts3 = (n - 3, 2, 1) if n % 2 == 0 else (n - 4, 2, 1, 1)
    g1 = cycle_type_poly(ell1, q, n, m, parts1)
    g2 = cycle_type_poly(ell2, q, n, m, parts2)
    g3 = cycle_type_poly(ell3, q, n, m, parts3)

    blocks = [(gamma, p), (g_lam, lam * lam), (g0, ell0),
              (g1, ell1), (g2, ell2), (g3, ell3)]
    L = 1
    for _, mod in blocks:
        L *= mod
    coeffs = []
    for i in range(2 * n + 1):
        r, mcur = 0, 1
        for poly, mod in blocks:
            ci = poly[i] if i < len(poly) else 0
            r = crt_pair(r, mcur, ci % mod, mod)
            mcur *= mod
        coeffs.append(r % L)
    target = CongruenceTarget(
        q=q, p=p, n=n, m_residue=m % L, L=L,
        factorization=((p, 1), (lam, 2), (ell0, 1), (ell1, 1), (ell2, 1),
                       (ell3, 1)),
        g_coeffs=tuple(coeffs))
    target.check_invariants()
    return target
